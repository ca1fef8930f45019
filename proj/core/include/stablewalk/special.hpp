#pragma once

#include <vector>

namespace stablewalk {

/// Hurwitz zeta  sum_{k>=0} (k + a)^{-s}  for s > 1, a > 0.
double hurwitz_zeta(double s, double a);

/// Riemann zeta for any real s != 1 (negative arguments included).
double riemann_zeta(double s);

/// 1 - psi(theta) for the symmetric axis law  P(+-r) = r^{-1-alpha} / (2 zeta(1+alpha)),
/// psi(theta) = sum_r r^{-1-alpha} cos(r theta) / zeta(1+alpha).
///
/// Evaluated from the expansion of the polylogarithm Li_{1+alpha}(e^{i theta}) around
/// theta = 0 (radius of convergence 2 pi), which avoids the slow convergence of the
/// defining cosine series near the origin and has no cancellation in 1 - psi.
class PowerLawCharacteristic {
 public:
  explicit PowerLawCharacteristic(double alpha);

  double alpha() const noexcept { return alpha_; }

  /// Valid for |theta| <= pi; the function is even.
  double one_minus_psi(double theta) const;
  double psi(double theta) const { return 1.0 - one_minus_psi(theta); }

  /// Brute-force cosine series with an integral remainder estimate; used only to
  /// cross-check the expansion.
  static double direct_series(double alpha, double theta, long terms);

 private:
  enum class Kind { kGeneric, kAlphaOne, kAlphaTwo };

  double alpha_;
  Kind kind_;
  double zeta_s_;          // zeta(1 + alpha)
  double singular_coeff_;  // Gamma(-alpha) cos(pi alpha / 2) for the generic case
  std::vector<double> even_coeffs_;  // coefficient of theta^{2j}, j >= 1
};

/// Row-wise binomial probabilities  C(n,k) p^k (1-p)^{n-k}  for n = 0..n_max, built
/// with the additive recurrence so that small rows are exact.
std::vector<std::vector<double>> binomial_rows(int n_max, double p);

}  // namespace stablewalk
