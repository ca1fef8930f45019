#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stablewalk/lattice.hpp"
#include "stablewalk/rng.hpp"
#include "stablewalk/site_set.hpp"
#include "stablewalk/step_law.hpp"

namespace stablewalk {

/// Nonnegative rational time num/den, den > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Exact value of the shortest decimal representation of `t` (0.25 -> 1/4,
  /// 0.1 -> 1/10), so grid inputs written in decimal stay exact.
  static Rational from_decimal(double t);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator<(const Rational& a, const Rational& b) noexcept;
  friend bool operator==(const Rational& a, const Rational& b) noexcept;
};

/// floor(n * t) in integer arithmetic.
std::int64_t floor_scaled(std::int64_t n, const Rational& t);

/// Increasing grid of times starting at 0.
class TimeGrid {
 public:
  TimeGrid() = default;
  /// Throws grid-not-increasing unless t[0] = 0 and entries strictly increase.
  explicit TimeGrid(std::vector<Rational> times);
  static TimeGrid from_decimals(const std::vector<double>& times);

  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<Rational>& times() const noexcept { return times_; }
  std::vector<double> values() const;
  /// floor(n t_i) for every grid point.
  std::vector<std::int64_t> floors(std::int64_t n) const;

 private:
  std::vector<Rational> times_;
};

/// A walk path with its range. The visited set maps every site of R_n to its
/// first-visit step.
class RangeState {
 public:
  explicit RangeState(const StepLaw& law, bool keep_path_log = false);

  const LatticePoint& position() const noexcept { return pos_; }
  std::int64_t step_count() const noexcept { return steps_; }
  std::size_t cardinality() const noexcept { return visited_.size(); }
  const SiteSet& visited() const noexcept { return visited_; }
  bool has_path_log() const noexcept { return keep_log_; }
  /// Positions S_0, ..., S_n (only when the log is enabled).
  const std::vector<LatticePoint>& path_log() const noexcept { return log_; }
  int dim() const noexcept { return law_->dim(); }

  /// Draws one step. Returns true when the new position is a new site.
  bool advance(StreamRng& rng);
  /// Moves to an explicit next position (scripted paths in tests).
  bool advance_to(const LatticePoint& next);

 private:
  bool record();

  const StepLaw* law_;
  LatticePoint pos_;
  std::int64_t steps_ = 0;
  SiteSet visited_;
  bool keep_log_;
  std::vector<LatticePoint> log_;
};

/// Stream used for the walk of replica `replica` under master seed `seed`.
inline StreamId walk_stream(std::uint64_t seed, std::uint64_t replica = 0) { return {seed, replica, 0}; }

RangeState simulate_path(const StepLaw& law, std::int64_t n, std::uint64_t seed, bool keep_path_log = false);
RangeState simulate_path(const StepLaw& law, std::int64_t n, StreamId stream, bool keep_path_log = false);

/// Per-replica process values on a time grid.
struct ProcessSample {
  std::int64_t n = 0;
  std::vector<double> t_grid;
  std::vector<std::int64_t> floor_nt;
  std::vector<double> cap_values;           // empty when capacity tracking is off
  std::vector<std::int64_t> range_values;
  std::uint64_t replica_id = 0;
  std::uint64_t seed = 0;
};

/// |R_{floor(n t_i)}| along one path in a single pass.
ProcessSample range_cardinality_process(const StepLaw& law, std::int64_t n, const TimeGrid& grid,
                                        std::uint64_t seed, std::uint64_t replica = 0);

/// |R_A ∩ R_B| for two recorded paths.
std::size_t intersect_count(const RangeState& a, const RangeState& b);

/// I_n = |R_n ∩ R~_n| for every n in `n_values`, from two recorded paths of
/// length at least max(n_values). Coupled across n, so the result is nondecreasing.
std::vector<std::int64_t> intersection_profile(const RangeState& a, const RangeState& b,
                                               const std::vector<std::int64_t>& n_values);

struct RangeDecomposition {
  std::int64_t card_m = 0;          // |R_m|
  std::int64_t card_shifted_n = 0;  // |R[m, m+n] - S_m|
  std::int64_t overlap = 0;         // |R_m ∩ R[m, m+n]|
  std::int64_t card_total = 0;      // |R_{m+n}|
  bool identity_holds() const noexcept { return card_total == card_m + card_shifted_n - overlap; }
};

/// Splits the first m+n steps of a logged path at time m.
RangeDecomposition decompose_range(const RangeState& path, std::int64_t m, std::int64_t n);

}  // namespace stablewalk
