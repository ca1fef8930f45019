#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "stablewalk/lattice.hpp"
#include "stablewalk/step_law.hpp"
#include "stablewalk/walker.hpp"

namespace stablewalk {

/// A Green-function value with an absolute error bound.
struct GreenValue {
  double value = 0.0;
  double error = 0.0;
};

/// Anything that can return G(0, z) with an error bound. Implementations are
/// immutable from the caller's point of view and safe to share between threads.
class GreenEvaluator {
 public:
  virtual ~GreenEvaluator() = default;
  /// Throws displacement-out-of-range when z cannot be certified.
  virtual GreenValue evaluate(const LatticePoint& z) const = 0;
  virtual int dim() const = 0;
  /// Largest error bound the evaluator may return.
  virtual double tolerance() const = 0;
  /// Largest Chebyshev norm the evaluator accepts.
  virtual std::int64_t max_radius() const = 0;
};

/// Lower constant c with 1 - psi(t) >= c |t|^alpha on [-pi, pi] for the axis law:
/// 2/pi^2 for the simple law; for power laws the grid minimum with a 2% margin.
double psi_lower_constant(const StepLaw& law);

/// Bound on sum_{n > horizon} sup_x P(S_n = x) from |phi|^n and the constant
/// above (infinite for periodic laws with phi = -1 somewhere).
double analytic_return_tail(const StepLaw& law, std::int64_t horizon);

struct QuadratureOptions {
  double tol = 1e-6;
  /// Upper bound on refinement rounds before tolerance-unreachable.
  int max_refinements = 4;
};

/// G(0, x) for axial laws from the product representation
///
///   G(0, x) = d / (1 - p0) * \int_0^\infty  prod_i k_s(x_i) ds,
///   k_s(m)  = (1/pi) \int_0^pi cos(m t) exp(-s (1 - psi(t))) dt,
///
/// obtained from the torus integral of 1/(1 - phi) by writing
/// 1/(1 - phi) = \int_0^\infty exp(-u (1 - phi)) du and factorizing over axes.
/// The inner integral runs over dyadic shells towards t = 0 with panels narrow
/// enough for the oscillation of cos(m t); the outer integral over dyadic
/// s-panels. Both use Gauss-Kronrod 7/15 pairs whose differences give the
/// quadrature error estimate. The s > S tail is bounded analytically through
/// k_s(m) <= Gamma(1 + 1/alpha) / pi * (c s)^{-1/alpha} with c a lower bound of
/// (1 - psi(t)) / t^alpha on (0, pi].
class QuadratureGreen final : public GreenEvaluator {
 public:
  QuadratureGreen(const StepLaw& law, std::int64_t max_radius, QuadratureOptions opts = {});

  GreenValue evaluate(const LatticePoint& z) const override;
  int dim() const override { return d_; }
  double tolerance() const override { return tol_; }
  std::int64_t max_radius() const override { return radius_; }

  /// k_s(m) tables exposed for tests: one-dimensional transition kernel of the
  /// continuous-time axis walk at time s (Kronrod rule).
  double axis_kernel(double s, std::int64_t m) const;
  /// Lower bound used for (1 - psi(t)) / t^alpha.
  double psi_lower_constant() const noexcept { return c_lower_; }
  double s_cutoff() const noexcept { return s_max_; }
  double tail_bound() const noexcept { return tail_bound_; }
  const std::string& law_fingerprint() const noexcept { return fingerprint_; }

 private:
  void build(int refinement);
  GreenValue compute(const LatticePoint& canonical) const;

  int d_;
  double alpha_;
  double loop_prob_;
  std::int64_t radius_;
  double tol_;
  std::string fingerprint_;
  const StepLaw* law_;
  double c_lower_ = 0.0;
  double s_max_ = 0.0;
  double tail_bound_ = 0.0;
  double theta_floor_error_ = 0.0;
  // theta rule
  std::vector<double> theta_nodes_, theta_wk_, theta_wg_;
  std::vector<double> one_minus_psi_;
  // s rule: nodes with Kronrod weights and Gauss weights
  std::vector<double> s_nodes_, s_wk_, s_wg_;
  // kernel tables [s-node][m], Kronrod and Gauss in theta
  std::vector<double> kern_k_, kern_g_;
  std::size_t stride_ = 0;

  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<LatticePoint, GreenValue, LatticePointHash> cache_;
};

/// quadrature_green(law, x, tol): single evaluation with a fresh evaluator.
GreenValue quadrature_green(const StepLaw& law, const LatticePoint& x, double tol);

enum class GreenMethod { kQuadrature, kConvolutionOracle };
std::string to_string(GreenMethod m);

/// Tabulated G(0, x) for |x|_inf <= radius.
class GreenTable final : public GreenEvaluator {
 public:
  GreenTable() = default;
  GreenTable(int d, std::string fingerprint, std::int64_t radius, GreenMethod method);

  void set(const LatticePoint& x, GreenValue v);
  GreenValue evaluate(const LatticePoint& z) const override;
  int dim() const override { return d_; }
  double tolerance() const override { return max_error_; }
  std::int64_t max_radius() const override { return radius_; }

  const std::string& law_fingerprint() const noexcept { return fingerprint_; }
  std::int64_t radius() const noexcept { return radius_; }
  GreenMethod method() const noexcept { return method_; }
  /// Entries keyed by canonical representative (sorted absolute coordinates).
  const std::map<LatticePoint, GreenValue>& entries() const noexcept { return entries_; }

  /// Partial sums P(S_n = 0) for n = 0..horizon (oracle tables only).
  std::vector<double> return_probabilities;

 private:
  int d_ = 1;
  std::string fingerprint_;
  std::int64_t radius_ = 0;
  GreenMethod method_ = GreenMethod::kQuadrature;
  double max_error_ = 0.0;
  std::map<LatticePoint, GreenValue> entries_;
};

/// Canonical representatives (sorted absolute coordinates) of norm <= radius.
std::vector<LatticePoint> canonical_points(int d, std::int64_t radius);

/// Fills a table with every canonical displacement of norm <= radius.
GreenTable tabulate(const QuadratureGreen& q, std::int64_t radius);

struct OracleOptions {
  /// log2 of the period of the torus used for the exact per-axis convolution
  /// powers of heavy-tailed laws.
  int period_log2 = 21;
  /// box-too-small is raised when the wrap-around error bound at any tabulated
  /// displacement exceeds this.
  double max_alias_error = 1e-3;
};

/// Exact partial sums  sum_{n <= horizon} P(S_n = x)  for |x|_inf <= box_radius,
/// returned as lower bounds, with error bounds covering (a) the wrap-around of
/// the periodic convolution and (b) the tail beyond the horizon, extrapolated
/// from the decay of the even return probabilities p_{2k}(0), which dominate
/// P(S_n = x) for symmetric laws.
///
/// The walk is decomposed into its number k of non-loop steps (binomial in n)
/// and the split of k over the axes (multinomial); each axis contributes an
/// exact one-dimensional convolution power a_l(m).
GreenTable convolution_green_oracle(const StepLaw& law, std::int64_t box_radius, std::int64_t horizon,
                                    OracleOptions opts = {});

/// G(A, B) = sum_{x in A, y in B} G(0, y - x), with the summed error bounds.
GreenValue mutual_energy(const std::vector<LatticePoint>& a, const std::vector<LatticePoint>& b,
                         const GreenEvaluator& green);

struct CrossGreenOptions {
  std::int64_t max_n = 256;
  /// Pairs with |y - x|_inf <= near_radius use the evaluator; farther pairs are
  /// estimated by counting visits of an auxiliary walk.
  std::int64_t near_radius = 8;
  /// Auxiliary walks are checked up to k0 steps and beyond that survive with
  /// probability (k0 / k)^beta (weights compensate), which keeps the estimator
  /// unbiased for the full series.
  double roulette_beta = 1.3;
  std::int64_t roulette_k0 = 0;  // 0 -> 2 * max(n)
  int workers = 1;
};

struct CrossGreenPoint {
  std::int64_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double systematic_error = 0.0;  // evaluator error on near pairs, averaged
};

/// Monte Carlo estimate of E[G(R_n, R~_n)] for two independent walks, for every
/// n in `n_values`, coupled across n (same walks, growing prefixes).
std::vector<CrossGreenPoint> cross_green_estimate(const StepLaw& law, const GreenEvaluator& near_green,
                                                  const std::vector<std::int64_t>& n_values, std::int64_t replicas,
                                                  std::uint64_t seed, const CrossGreenOptions& opts = {});

}  // namespace stablewalk
