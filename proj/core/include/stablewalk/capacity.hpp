#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stablewalk/green.hpp"
#include "stablewalk/lattice.hpp"
#include "stablewalk/step_law.hpp"
#include "stablewalk/walker.hpp"

namespace stablewalk {

enum class CapacityMethod { kEquilibriumSolve, kMcEscape };
std::string to_string(CapacityMethod m);
CapacityMethod capacity_method_from_string(const std::string& s);

struct CapacityEstimate {
  double value = 0.0;
  double std_error = 0.0;    // Monte Carlo standard error, 0 for the exact solve
  double error_bound = 0.0;  // propagated Green error, exact solve only
  CapacityMethod method = CapacityMethod::kEquilibriumSolve;
  std::optional<std::int64_t> horizon;
  std::optional<double> stability_gap;
  double condition = 1.0;  // 2-norm condition number of the Green matrix
  std::size_t set_size = 0;
  std::vector<double> equilibrium;  // e(y) for the sorted, deduplicated set
};

struct EquilibriumOptions {
  std::size_t max_size = 1024;
  /// Refuse when condition * green tolerance exceeds this.
  double max_amplification = 1e-2;
  /// e(y) must lie in [-range_tol, 1 + range_tol] beyond its own error bound.
  double range_tol = 1e-6;
};

/// Cap(A) = sum_y e(y) where G e = 1 on A. The set is deduplicated and sorted
/// first; Cap(empty) = 0. With Delta the Green errors (|Delta_ij| <= eps_ij) and
/// eta = |eps|_F / lambda_min the error bound is
///   sum_ij |e_i| eps_ij |e_j| + |eps|_F |e|_2^2 eta / (1 - eta).
CapacityEstimate equilibrium_capacity(std::vector<LatticePoint> a, const GreenEvaluator& green,
                                      const EquilibriumOptions& opts = {});

/// Capacities of every prefix {x_0..x_{k-1}} of an ordered list of distinct
/// sites, from one Cholesky factor: Cap_k = |L_k^{-1} 1|^2, so the values are
/// nondecreasing in k up to rounding.
struct PrefixCapacities {
  std::vector<double> values;  // values[k] = Cap of the first k sites, values[0] = 0
  std::vector<double> errors;
  double condition = 1.0;
};
PrefixCapacities prefix_capacities(const std::vector<LatticePoint>& sites, const GreenEvaluator& green,
                                   const EquilibriumOptions& opts = {});

/// C_k = Cap(R_k) for k = 0..steps of a logged path.
PrefixCapacities path_capacities(const RangeState& path, const GreenEvaluator& green,
                                 const EquilibriumOptions& opts = {});

struct EscapeOptions {
  std::int64_t horizon = 100000;
  std::int64_t trials_per_point = 100000;
  /// Trials are followed exactly for k0 steps; afterwards a trial survives to
  /// step k with probability (k0 / k)^beta and a return at step k is weighted
  /// by the inverse, which keeps the estimate unbiased for P(T_A^+ <= horizon).
  std::int64_t roulette_k0 = 16;
  double roulette_beta = 1.5;
  /// Half-budget rerun at twice the horizon; the difference is the stability gap.
  bool stability_run = true;
  /// Doubling of the horizon while the gap exceeds this (0 disables doubling).
  double gap_tolerance = 0.0;
  int max_doublings = 0;
  int workers = 1;
};

/// Sum over x in A of the estimated P_x(T_A^+ > horizon).
CapacityEstimate mc_escape_capacity(std::vector<LatticePoint> a, const StepLaw& law, std::uint64_t seed,
                                    const EscapeOptions& opts = {});

struct CapacityProcessConfig {
  CapacityMethod estimator = CapacityMethod::kMcEscape;
  /// mc-escape: one escape walk of this many steps per visited site, shared by
  /// all grid times (site x counts at time m iff its walk avoids R_m).
  std::int64_t escape_horizon = 256;
  /// equilibrium-solve: evaluator covering every displacement of the path.
  const GreenEvaluator* green = nullptr;
  EquilibriumOptions equilibrium;
};

/// C_{floor(n t_i)} and |R_{floor(n t_i)}| along one path. The walk uses
/// walk_stream(seed, replica); escape walks use a stream tagged kEscape.
ProcessSample capacity_process(const StepLaw& law, std::int64_t n, const TimeGrid& grid,
                               const CapacityProcessConfig& cfg, std::uint64_t seed, std::uint64_t replica = 0);

struct DecompositionReport {
  CapacityEstimate cap_a, cap_b, cap_union;
  GreenValue mutual{};  // G(A, B)
  double upper_slack = 0.0;  // Cap(A) + Cap(B) - Cap(A u B)
  double lower_slack = 0.0;  // Cap(A u B) - Cap(A) - Cap(B) + 2 G(A, B)
  double tolerance = 0.0;    // propagated error allowance
  bool subadditive = false;
  bool lower_bound = false;
};

DecompositionReport decomposition_bounds_check(const std::vector<LatticePoint>& a, const std::vector<LatticePoint>& b,
                                               const GreenEvaluator& green, const EquilibriumOptions& opts = {});

}  // namespace stablewalk
