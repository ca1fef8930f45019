#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace stablewalk {

/// b(x) = x^{1/alpha} l(x) with l(x) = c (constant) or c (1 + log x)^gamma.
struct ScalingSpec {
  enum class Ell { kConstant, kLogPower };

  int d = 2;
  double alpha = 1.0;
  Ell ell = Ell::kConstant;
  double c = 1.0;
  double gamma = 0.0;

  double ell_at(double x) const;
  double b(double x) const;
  double ratio() const { return d / alpha; }
};

/// Growth envelope of E[G(R_n, R~_n)]:
///   1                               d/alpha > 3
///   sum_{k<=n} k^{-1} l(k)^{-d}     d/alpha = 3
///   n^3 b(n)^{-d}                   2 < d/alpha < 3
/// Throws out-of-regime for d/alpha <= 2.
double H_d(std::int64_t n, const ScalingSpec& spec);

/// Growth envelope of E[I_n]: same shape one power lower (d/alpha > 1).
double F_d(std::int64_t n, const ScalingSpec& spec);

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
  std::size_t points = 0;
};

/// OLS of log(value) on log(n); the confidence interval uses the Student t
/// quantile with points - 2 degrees of freedom. Needs >= 3 pairs.
GrowthFit growth_exponent(const std::vector<std::pair<double, double>>& pairs, double level = 0.95);

}  // namespace stablewalk
