#include "stablewalk/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <numbers>

#include "stablewalk/error.hpp"

namespace stablewalk {
namespace {

// B_{2j} / (2j)! for j = 1..7.
constexpr double kBernoulliOverFactorial[] = {
    1.0 / 12.0,        -1.0 / 720.0,         1.0 / 30240.0,           -1.0 / 1209600.0,
    1.0 / 47900160.0,  -691.0 / 1307674368000.0, 1.0 / 74724249600.0,
};

}  // namespace

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "hurwitz_zeta requires s > 1 and a > 0");
  }
  double sum = 0.0;
  double b = a;
  while (b < 16.0) {
    sum += std::pow(b, -s);
    b += 1.0;
  }
  // Euler-Maclaurin remainder at b.
  sum += std::pow(b, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(b, -s);
  double rising = s;  // s (s+1) ... (s + 2j - 2)
  double bpow = std::pow(b, -s - 1.0);
  const double inv_b2 = 1.0 / (b * b);
  for (int j = 0; j < 7; ++j) {
    sum += kBernoulliOverFactorial[j] * rising * bpow;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    bpow *= inv_b2;
  }
  return sum;
}

double riemann_zeta(double s) { return boost::math::zeta(s); }

PowerLawCharacteristic::PowerLawCharacteristic(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || alpha > 2.0) {
    throw Error(ErrorCode::kInvalidParameter, "stability index must lie in (0, 2]");
  }
  const double s = 1.0 + alpha;
  zeta_s_ = riemann_zeta(s);
  if (alpha == 1.0) {
    kind_ = Kind::kAlphaOne;
    return;
  }
  int first_j = 1;
  if (alpha == 2.0) {
    kind_ = Kind::kAlphaTwo;
    first_j = 2;
  } else {
    kind_ = Kind::kGeneric;
    singular_coeff_ = boost::math::tgamma(-alpha) * std::cos(std::numbers::pi * alpha / 2.0);
  }
  // theta^{2j} coefficients zeta(s - 2j) (-1)^j / (2j)!; stop once the term at
  // theta = pi is negligible (ratio ~ 1/4 per order).
  double log_fact = 0.0;
  for (int j = 1; j < 80; ++j) {
    log_fact += std::log(2.0 * j - 1.0) + std::log(2.0 * j);
    if (j < first_j) {
      even_coeffs_.push_back(0.0);
      continue;
    }
    const double z = riemann_zeta(s - 2.0 * j);
    const double c = (j % 2 ? -1.0 : 1.0) * z * std::exp(-log_fact);
    even_coeffs_.push_back(c);
    if (std::abs(c) * std::pow(std::numbers::pi, 2.0 * j) < 1e-19 && j > 4) break;
  }
}

double PowerLawCharacteristic::one_minus_psi(double theta) const {
  theta = std::abs(theta);
  if (theta == 0.0) return 0.0;
  if (theta > std::numbers::pi) {
    throw Error(ErrorCode::kInvalidParameter, "one_minus_psi expects |theta| <= pi");
  }
  const double t2 = theta * theta;
  if (kind_ == Kind::kAlphaOne) {
    return (std::numbers::pi * theta / 2.0 - t2 / 4.0) / zeta_s_;
  }
  // Horner in theta^2 over the regular part.
  double poly = 0.0;
  for (auto it = even_coeffs_.rbegin(); it != even_coeffs_.rend(); ++it) poly = poly * t2 + *it;
  poly *= t2;
  if (kind_ == Kind::kAlphaTwo) {
    return (0.5 * t2 * (1.5 - std::log(theta)) - poly) / zeta_s_;
  }
  return -(singular_coeff_ * std::pow(theta, alpha_) + poly) / zeta_s_;
}

double PowerLawCharacteristic::direct_series(double alpha, double theta, long terms) {
  const double s = 1.0 + alpha;
  double sum = 0.0;
  for (long r = terms; r >= 1; --r) {
    sum += std::pow(static_cast<double>(r), -s) * (1.0 - std::cos(r * theta));
  }
  // Remainder: the tail of sum r^{-s} (1 - cos r theta) averages to the tail of sum r^{-s}.
  sum += hurwitz_zeta(s, static_cast<double>(terms + 1));
  return sum / riemann_zeta(s);
}

std::vector<std::vector<double>> binomial_rows(int n_max, double p) {
  const double q = 1.0 - p;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n_max) + 1);
  rows[0] = {1.0};
  for (int n = 1; n <= n_max; ++n) {
    auto& row = rows[n];
    const auto& prev = rows[n - 1];
    row.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      double v = 0.0;
      if (k < n) v += q * prev[k];
      if (k > 0) v += p * prev[k - 1];
      row[k] = v;
    }
  }
  return rows;
}

}  // namespace stablewalk
