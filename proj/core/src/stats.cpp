#include "stablewalk/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

#include "stablewalk/error.hpp"
#include "stablewalk/rng.hpp"

namespace stablewalk {
namespace {

std::vector<double> studentize(const std::vector<double>& x) {
  const Moments m = sample_moments(x);
  if (!(m.variance > 0.0)) throw Error(ErrorCode::kDegenerateSample, "sample has zero variance");
  const double sd = std::sqrt(m.variance);
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - m.mean) / sd;
  return z;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

bool TestReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

double TestReport::stat(const std::string& stat_name) const {
  for (const auto& s : statistics) {
    if (s.name == stat_name) return s.value;
  }
  throw Error(ErrorCode::kInvalidParameter, "report has no statistic '" + stat_name + "'");
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double standard_normal_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p); }

Moments sample_moments(const std::vector<double>& x) {
  Moments m;
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) throw Error(ErrorCode::kInsufficientReplicas, "need at least two samples");
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2 * n / (n - 1.0);
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

double ks_distance_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const auto n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = standard_normal_cdf(z[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

TestReport normality_report(const std::vector<double>& samples, const NormalityOptions& opts) {
  if (samples.size() < 100) throw Error(ErrorCode::kInsufficientReplicas, "normality_report needs >= 100 samples");
  if (opts.bootstrap < 1) throw Error(ErrorCode::kInvalidParameter, "bootstrap count must be >= 1");
  const std::vector<double> z = studentize(samples);
  const double d = ks_distance_normal(z);
  int exceed = 0;
  std::vector<double> sim(samples.size());
  for (int b = 0; b < opts.bootstrap; ++b) {
    StreamRng rng(StreamId{opts.seed, stream_tag(StreamPurpose::kBootstrap, static_cast<std::uint64_t>(b)), 0});
    for (double& v : sim) v = rng.normal();
    if (ks_distance_normal(studentize(sim)) >= d) ++exceed;
  }
  const double p = (1.0 + exceed) / (1.0 + opts.bootstrap);

  const Moments m = sample_moments(samples);
  const auto n = static_cast<double>(samples.size());
  const double se_skew = std::sqrt(6.0 * n * (n - 1.0) / ((n - 2.0) * (n + 1.0) * (n + 3.0)));
  const double se_kurt = 2.0 * se_skew * std::sqrt((n * n - 1.0) / ((n - 3.0) * (n + 5.0)));
  const double zq = standard_normal_quantile(0.5 + 0.5 * opts.ci_level);

  TestReport r;
  r.name = "normality";
  r.sample_size = samples.size();
  r.add("mean", m.mean);
  r.add("std", std::sqrt(m.variance));
  r.add("ks_distance", d);
  r.add("ks_p_value", p);
  r.add("bootstrap_resamples", opts.bootstrap);
  r.add("skewness", m.skewness);
  r.add("skewness_ci_low", m.skewness - zq * se_skew);
  r.add("skewness_ci_high", m.skewness + zq * se_skew);
  r.add("excess_kurtosis", m.excess_kurtosis);
  r.add("excess_kurtosis_ci_low", m.excess_kurtosis - zq * se_kurt);
  r.add("excess_kurtosis_ci_high", m.excess_kurtosis + zq * se_kurt);
  r.verdicts.push_back({"ks_p_value_above_alpha", p > opts.ks_alpha, p, opts.ks_alpha, "ks_alpha"});
  r.verdicts.push_back({"abs_skewness_below", std::abs(m.skewness) < opts.max_abs_skewness, std::abs(m.skewness),
                        opts.max_abs_skewness, "max_abs_skewness"});
  r.verdicts.push_back({"abs_excess_kurtosis_below", std::abs(m.excess_kurtosis) < opts.max_abs_excess_kurtosis,
                        std::abs(m.excess_kurtosis), opts.max_abs_excess_kurtosis, "max_abs_excess_kurtosis"});
  return r;
}

TestReport fdd_covariance_report(const SampleMatrix& values, const std::vector<double>& t_positive,
                                 const CovarianceOptions& opts) {
  const std::size_t m = values.size();
  const std::size_t k = t_positive.size();
  if (m < opts.min_replicas) {
    throw Error(ErrorCode::kInsufficientReplicas,
                "fdd_covariance_report needs >= " + std::to_string(opts.min_replicas) + " replicas");
  }
  if (k < 2) throw Error(ErrorCode::kInvalidParameter, "need at least two positive grid times");
  for (std::size_t j = 0; j < k; ++j) {
    if (!(t_positive[j] > 0.0) || (j > 0 && !(t_positive[j] > t_positive[j - 1]))) {
      throw Error(ErrorCode::kGridNotIncreasing, "positive grid times must strictly increase");
    }
  }
  for (const auto& row : values) {
    if (row.size() != k) throw Error(ErrorCode::kLengthMismatch, "replica row length differs from the grid");
  }
  const double t_max = t_positive.back();

  // Normalized covariance of the rows selected by idx (with multiplicity).
  auto normalized = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> mean(k, 0.0);
    for (std::size_t r : idx) {
      for (std::size_t j = 0; j < k; ++j) mean[j] += values[r][j];
    }
    for (double& v : mean) v /= static_cast<double>(idx.size());
    std::vector<double> cov(k * k, 0.0);
    for (std::size_t r : idx) {
      for (std::size_t i = 0; i < k; ++i) {
        const double di = values[r][i] - mean[i];
        for (std::size_t j = i; j < k; ++j) cov[i * k + j] += di * (values[r][j] - mean[j]);
      }
    }
    const double var_last = cov[k * k - 1];
    if (!(var_last > 0.0)) throw Error(ErrorCode::kDegenerateSample, "zero variance at the largest time");
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) cov[i * k + j] *= t_max / var_last;
    }
    return cov;
  };

  std::vector<std::size_t> all(m);
  for (std::size_t r = 0; r < m; ++r) all[r] = r;
  const std::vector<double> point = normalized(all);
  std::vector<std::vector<double>> boot(k * k);
  std::vector<std::size_t> idx(m);
  for (int b = 0; b < opts.bootstrap; ++b) {
    StreamRng rng(StreamId{opts.seed, stream_tag(StreamPurpose::kBootstrap, static_cast<std::uint64_t>(b)), 1});
    for (auto& i : idx) i = rng.below(m);
    const auto c = normalized(idx);
    for (std::size_t e = 0; e < c.size(); ++e) boot[e].push_back(c[e]);
  }

  TestReport r;
  r.name = "fdd_covariance";
  r.sample_size = m;
  double var_last = 0.0;
  {
    double mean = 0.0;
    for (const auto& row : values) mean += row.back();
    mean /= static_cast<double>(m);
    for (const auto& row : values) var_last += (row.back() - mean) * (row.back() - mean);
    var_last /= static_cast<double>(m - 1);
  }
  r.sigma_hat = std::sqrt(var_last / t_max);
  double worst_rel = 0.0;
  const double lo_q = 0.5 - 0.5 * opts.ci_level;
  const double hi_q = 0.5 + 0.5 * opts.ci_level;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      const double target = std::min(t_positive[i], t_positive[j]);
      const double est = point[i * k + j];
      const double lo = opts.bootstrap > 0 ? percentile(boot[i * k + j], lo_q) : est;
      const double hi = opts.bootstrap > 0 ? percentile(boot[i * k + j], hi_q) : est;
      const std::string tag = "cov_" + std::to_string(i) + "_" + std::to_string(j);
      r.add(tag, est);
      r.add(tag + "_ci_low", lo);
      r.add(tag + "_ci_high", hi);
      r.add(tag + "_target", target);
      const double rel = std::abs(est - target) / target;
      worst_rel = std::max(worst_rel, rel);
      const bool overlap = hi >= (1.0 - opts.rel_tol) * target && lo <= (1.0 + opts.rel_tol) * target;
      r.verdicts.push_back({tag + "_within_band", overlap, rel, opts.rel_tol, "covariance_rel_tol"});
    }
  }
  r.add("worst_relative_deviation", worst_rel);
  return r;
}

std::vector<double> cramer_wold_projection(const SampleMatrix& values, const std::vector<double>& center,
                                           const std::vector<double>& coefficients, double scale) {
  if (center.size() != coefficients.size()) {
    throw Error(ErrorCode::kLengthMismatch, "centering and coefficient vectors differ in length");
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values) {
    if (row.size() != coefficients.size()) {
      throw Error(ErrorCode::kLengthMismatch, "coefficient vector length differs from the positive grid");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += coefficients[j] * (row[j] - center[j]);
    out.push_back(s * scale);
  }
  return out;
}

std::string StopRule::describe() const {
  if (kind == Kind::kFixedTime) return "fixed-time(" + std::to_string(time) + ")";
  return "first-passage(level=" + std::to_string(level) + ",cap=" + std::to_string(cap) + ")";
}

TestReport condition_ii_proxy(const SampleMatrix& x, const std::vector<double>& t_grid, const StopRule& rule,
                              const ConditionIIOptions& opts) {
  if (x.empty()) throw Error(ErrorCode::kInsufficientReplicas, "no replicas");
  if (opts.h_values.empty()) throw Error(ErrorCode::kInvalidParameter, "no h values");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw Error(ErrorCode::kGridNotIncreasing, "grid must strictly increase");
  }
  auto index_of = [&](double t) -> std::size_t {
    if (t > t_grid.back() + 1e-9) {
      throw Error(ErrorCode::kStopTimeExceedsHorizon, "T + h = " + std::to_string(t) + " beyond the grid");
    }
    const auto it = std::lower_bound(t_grid.begin(), t_grid.end(), t - 1e-9);
    if (it == t_grid.end() || std::abs(*it - t) > 1e-9) {
      throw Error(ErrorCode::kInvalidParameter, "time " + std::to_string(t) + " is not a grid time");
    }
    return static_cast<std::size_t>(it - t_grid.begin());
  };
  const std::size_t cap_index =
      index_of(rule.kind == StopRule::Kind::kFixedTime ? rule.time : rule.cap);
  std::vector<std::size_t> hits(opts.h_values.size(), 0);
  for (const auto& row : x) {
    if (row.size() != t_grid.size()) throw Error(ErrorCode::kLengthMismatch, "replica row length differs from grid");
    std::size_t stop = cap_index;
    if (rule.kind == StopRule::Kind::kFirstPassage) {
      for (std::size_t j = 0; j < cap_index; ++j) {
        if (row[j] > rule.level) {
          stop = j;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < opts.h_values.size(); ++i) {
      const std::size_t later = index_of(t_grid[stop] + opts.h_values[i]);
      if (std::abs(row[later] - row[stop]) >= opts.epsilon) ++hits[i];
    }
  }
  TestReport r;
  r.name = "condition_ii_proxy";
  r.proxy = true;
  r.sample_size = x.size();
  r.note = "proxy for the tightness condition, stop rule " + rule.describe();
  r.add("epsilon", opts.epsilon);
  bool monotone = true;
  double prev = 1.0;
  for (std::size_t i = 0; i < opts.h_values.size(); ++i) {
    const double p = static_cast<double>(hits[i]) / static_cast<double>(x.size());
    r.add("p_h=" + std::to_string(opts.h_values[i]), p);
    if (p > prev) monotone = false;
    prev = p;
  }
  r.verdicts.push_back({"nonincreasing_in_h", monotone, monotone ? 0.0 : 1.0, 0.0, "condition_ii_h_values"});
  r.verdicts.push_back({"smallest_h_below_ceiling", prev < opts.ceiling, prev, opts.ceiling, "condition_ii_ceiling"});
  return r;
}

TwoSampleKs two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInsufficientReplicas, "two_sample_ks needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double q = 0.0;
  if (lambda < 0.2) {
    q = 1.0;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
      q += term;
      if (std::abs(term) < 1e-16) break;
    }
  }
  return {d, std::clamp(q, 0.0, 1.0)};
}

}  // namespace stablewalk
