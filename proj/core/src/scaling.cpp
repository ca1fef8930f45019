#include "stablewalk/scaling.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "stablewalk/error.hpp"

namespace stablewalk {
namespace {

enum class Regime { kAbove, kCritical, kBelow };

Regime classify(double ratio, double critical) {
  if (std::abs(ratio - critical) <= 1e-12 * critical) return Regime::kCritical;
  return ratio > critical ? Regime::kAbove : Regime::kBelow;
}

void validate(const ScalingSpec& spec, std::int64_t n) {
  if (spec.d < 1 || !(spec.alpha > 0.0) || spec.alpha > 2.0 || !(spec.c > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "scaling spec needs d >= 1, alpha in (0, 2], c > 0");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidParameter, "n must be >= 1");
}

double log_sum(std::int64_t n, const ScalingSpec& spec) {
  double s = 0.0;
  for (std::int64_t k = n; k >= 1; --k) {
    s += 1.0 / (static_cast<double>(k) * std::pow(spec.ell_at(static_cast<double>(k)), spec.d));
  }
  return s;
}

double envelope(std::int64_t n, const ScalingSpec& spec, double critical, double power, const char* name) {
  validate(spec, n);
  const double lower = critical - 1.0;
  if (classify(spec.ratio(), lower) != Regime::kAbove) {
    throw Error(ErrorCode::kOutOfRegime, std::string(name) + " needs d/alpha > " + std::to_string(lower));
  }
  switch (classify(spec.ratio(), critical)) {
    case Regime::kAbove: return 1.0;
    case Regime::kCritical: return log_sum(n, spec);
    case Regime::kBelow: break;
  }
  const auto x = static_cast<double>(n);
  return std::pow(x, power) * std::pow(spec.b(x), -spec.d);
}

}  // namespace

double ScalingSpec::ell_at(double x) const {
  if (ell == Ell::kConstant) return c;
  return c * std::pow(1.0 + std::log(x), gamma);
}

double ScalingSpec::b(double x) const { return std::pow(x, 1.0 / alpha) * ell_at(x); }

double H_d(std::int64_t n, const ScalingSpec& spec) { return envelope(n, spec, 3.0, 3.0, "H_d"); }

double F_d(std::int64_t n, const ScalingSpec& spec) { return envelope(n, spec, 2.0, 2.0, "F_d"); }

GrowthFit growth_exponent(const std::vector<std::pair<double, double>>& pairs, double level) {
  if (pairs.size() < 3) throw Error(ErrorCode::kInvalidParameter, "growth_exponent needs >= 3 pairs");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kInvalidParameter, "confidence level must be in (0, 1)");
  std::vector<double> x, y;
  for (const auto& [n, v] : pairs) {
    if (!(n > 0.0)) throw Error(ErrorCode::kInvalidParameter, "n must be positive");
    if (!(v > 0.0)) throw Error(ErrorCode::kNonpositiveValue, "value " + std::to_string(v) + " is not positive");
    x.push_back(std::log(n));
    y.push_back(std::log(v));
  }
  const auto m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::kInvalidParameter, "growth_exponent needs at least two distinct n");
  GrowthFit fit;
  fit.points = x.size();
  fit.level = level;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.std_error = std::sqrt(rss / (m - 2.0) / sxx);
  const boost::math::students_t dist(m - 2.0);
  const double q = boost::math::quantile(dist, 0.5 + 0.5 * level);
  fit.ci_low = fit.slope - q * fit.std_error;
  fit.ci_high = fit.slope + q * fit.std_error;
  return fit;
}

}  // namespace stablewalk
