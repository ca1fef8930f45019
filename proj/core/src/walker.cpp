#include "stablewalk/walker.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "stablewalk/error.hpp"

namespace stablewalk {
namespace {

__extension__ typedef __int128 i128;

constexpr std::int64_t kCoordinateLimit = std::int64_t{1} << 62;

}  // namespace

Rational Rational::from_decimal(double t) {
  if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::kInvalidParameter, "grid times must be finite and >= 0");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, t);
  const std::string s(buf, res.ptr);
  std::int64_t mantissa = 0;
  int frac_digits = 0;
  int exponent = 0;
  bool in_frac = false;
  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '.') {
      in_frac = true;
    } else if (c == 'e' || c == 'E') {
      exponent = std::stoi(s.substr(i + 1));
      break;
    } else {
      if (mantissa > (INT64_MAX - 9) / 10) throw Error(ErrorCode::kInvalidParameter, "grid time has too many digits");
      mantissa = mantissa * 10 + (c - '0');
      if (in_frac) ++frac_digits;
    }
  }
  int scale = frac_digits - exponent;  // value = mantissa * 10^{-scale}
  Rational r{mantissa, 1};
  for (; scale < 0; ++scale) r.num *= 10;
  for (; scale > 0; --scale) {
    if (r.den > INT64_MAX / 10) throw Error(ErrorCode::kInvalidParameter, "grid time too fine");
    r.den *= 10;
  }
  const std::int64_t g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

bool operator<(const Rational& a, const Rational& b) noexcept {
  return static_cast<i128>(a.num) * b.den < static_cast<i128>(b.num) * a.den;
}

bool operator==(const Rational& a, const Rational& b) noexcept {
  return static_cast<i128>(a.num) * b.den == static_cast<i128>(b.num) * a.den;
}

std::int64_t floor_scaled(std::int64_t n, const Rational& t) {
  if (n < 0 || t.num < 0 || t.den <= 0) throw Error(ErrorCode::kInvalidParameter, "floor_scaled expects n, t >= 0");
  return static_cast<std::int64_t>(static_cast<i128>(n) * t.num / t.den);
}

TimeGrid::TimeGrid(std::vector<Rational> times) : times_(std::move(times)) {
  if (times_.empty() || times_.front().num != 0) {
    throw Error(ErrorCode::kGridNotIncreasing, "time grid must start at 0");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i - 1] < times_[i])) throw Error(ErrorCode::kGridNotIncreasing, "time grid must strictly increase");
  }
}

TimeGrid TimeGrid::from_decimals(const std::vector<double>& times) {
  std::vector<Rational> r;
  r.reserve(times.size());
  for (double t : times) r.push_back(Rational::from_decimal(t));
  return TimeGrid(std::move(r));
}

std::vector<double> TimeGrid::values() const {
  std::vector<double> v;
  for (const auto& t : times_) v.push_back(t.value());
  return v;
}

std::vector<std::int64_t> TimeGrid::floors(std::int64_t n) const {
  std::vector<std::int64_t> v;
  for (const auto& t : times_) v.push_back(floor_scaled(n, t));
  return v;
}

RangeState::RangeState(const StepLaw& law, bool keep_path_log)
    : law_(&law), pos_(LatticePoint::origin(law.dim())), visited_(law.dim()), keep_log_(keep_path_log) {
  record();
}

bool RangeState::record() {
  for (int i = 0; i < pos_.dim(); ++i) {
    if (pos_[i] >= kCoordinateLimit || pos_[i] <= -kCoordinateLimit) {
      throw Error(ErrorCode::kPackingOverflow, "walk left the representable coordinate range");
    }
  }
  if (keep_log_) log_.push_back(pos_);
  return visited_.insert(pos_, steps_);
}

bool RangeState::advance(StreamRng& rng) {
  law_->step(pos_, rng);
  ++steps_;
  return record();
}

bool RangeState::advance_to(const LatticePoint& next) {
  if (next.dim() != pos_.dim()) throw Error(ErrorCode::kDimensionMismatch, "scripted step has wrong dimension");
  pos_ = next;
  ++steps_;
  return record();
}

RangeState simulate_path(const StepLaw& law, std::int64_t n, StreamId stream, bool keep_path_log) {
  if (n < 0) throw Error(ErrorCode::kInvalidParameter, "path length must be >= 0");
  RangeState state(law, keep_path_log);
  StreamRng rng(stream);
  for (std::int64_t k = 0; k < n; ++k) state.advance(rng);
  return state;
}

RangeState simulate_path(const StepLaw& law, std::int64_t n, std::uint64_t seed, bool keep_path_log) {
  return simulate_path(law, n, walk_stream(seed), keep_path_log);
}

ProcessSample range_cardinality_process(const StepLaw& law, std::int64_t n, const TimeGrid& grid, std::uint64_t seed,
                                        std::uint64_t replica) {
  if (n < 1) throw Error(ErrorCode::kInvalidParameter, "n must be positive");
  ProcessSample out;
  out.n = n;
  out.t_grid = grid.values();
  out.floor_nt = grid.floors(n);
  out.replica_id = replica;
  out.seed = seed;
  RangeState state(law);
  StreamRng rng(walk_stream(seed, replica));
  for (std::int64_t target : out.floor_nt) {
    while (state.step_count() < target) state.advance(rng);
    out.range_values.push_back(static_cast<std::int64_t>(state.cardinality()));
  }
  return out;
}

std::size_t intersect_count(const RangeState& a, const RangeState& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimensionMismatch, "paths live in different dimensions");
  const SiteSet& small = a.cardinality() <= b.cardinality() ? a.visited() : b.visited();
  const SiteSet& large = a.cardinality() <= b.cardinality() ? b.visited() : a.visited();
  std::size_t count = 0;
  small.for_each([&](const LatticePoint& p, std::int64_t) { count += large.contains(p); });
  return count;
}

std::vector<std::int64_t> intersection_profile(const RangeState& a, const RangeState& b,
                                               const std::vector<std::int64_t>& n_values) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimensionMismatch, "paths live in different dimensions");
  for (auto n : n_values) {
    if (n > a.step_count() || n > b.step_count()) {
      throw Error(ErrorCode::kInsufficientPath, "paths are shorter than the requested n");
    }
  }
  std::vector<std::int64_t> joint;  // time at which a common site is in both ranges
  a.visited().for_each([&](const LatticePoint& p, std::int64_t fa) {
    const std::int64_t fb = b.visited().first_visit(p);
    if (fb != SiteSet::kEmpty) joint.push_back(std::max(fa, fb));
  });
  std::sort(joint.begin(), joint.end());
  std::vector<std::int64_t> out;
  for (auto n : n_values) {
    out.push_back(std::upper_bound(joint.begin(), joint.end(), n) - joint.begin());
  }
  return out;
}

RangeDecomposition decompose_range(const RangeState& path, std::int64_t m, std::int64_t n) {
  if (m < 0 || n < 0) throw Error(ErrorCode::kInvalidParameter, "m and n must be >= 0");
  if (!path.has_path_log() || static_cast<std::int64_t>(path.path_log().size()) < m + n + 1) {
    throw Error(ErrorCode::kInsufficientPath, "path log shorter than m + n steps");
  }
  const auto& log = path.path_log();
  const int d = path.dim();
  SiteSet head(d, static_cast<std::size_t>(m + 1));
  SiteSet tail(d, static_cast<std::size_t>(n + 1));
  SiteSet total(d, static_cast<std::size_t>(m + n + 1));
  for (std::int64_t k = 0; k <= m; ++k) head.insert(log[k], k);
  for (std::int64_t k = m; k <= m + n; ++k) tail.insert(log[k] - log[m], k);
  for (std::int64_t k = 0; k <= m + n; ++k) total.insert(log[k], k);
  RangeDecomposition r;
  r.card_m = static_cast<std::int64_t>(head.size());
  r.card_shifted_n = static_cast<std::int64_t>(tail.size());
  r.card_total = static_cast<std::int64_t>(total.size());
  for (std::int64_t k = m; k <= m + n; ++k) {
    // Count each site of R[m, m+n] once: at its first occurrence in the segment.
    if (tail.first_visit(log[k] - log[m]) == k && head.contains(log[k])) ++r.overlap;
  }
  return r;
}

}  // namespace stablewalk
