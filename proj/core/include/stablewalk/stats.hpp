#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stablewalk {

struct Statistic {
  std::string name;
  double value = 0.0;
};

/// One pass/fail decision. `tolerance` names the config entry that set the
/// threshold.
struct Verdict {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string tolerance;
};

struct TestReport {
  std::string name;
  std::size_t sample_size = 0;
  std::vector<Statistic> statistics;
  std::vector<Verdict> verdicts;
  std::optional<double> sigma_hat;
  bool proxy = false;
  std::string note;

  bool passed() const;
  /// Value of a named statistic; throws invalid-parameter when absent.
  double stat(const std::string& name) const;
  void add(std::string stat_name, double value) { statistics.push_back({std::move(stat_name), value}); }
};

/// Replica-major sample matrix: values[r][j] is replica r at positive grid
/// position j.
using SampleMatrix = std::vector<std::vector<double>>;

struct NormalityOptions {
  int bootstrap = 500;
  std::uint64_t seed = 0;
  double ks_alpha = 0.01;
  double max_abs_skewness = 0.15;
  double max_abs_excess_kurtosis = 0.35;
  double ci_level = 0.99;
};

double standard_normal_cdf(double x);
double standard_normal_quantile(double p);

/// Kolmogorov-Smirnov distance of a sample to N(0, 1).
double ks_distance_normal(std::vector<double> z);

/// Studentizes the sample; KS distance with a parametric-bootstrap p-value
/// (normal samples of the same size, studentized the same way); sample
/// skewness and excess kurtosis with normal-theory confidence intervals.
TestReport normality_report(const std::vector<double>& samples, const NormalityOptions& opts = {});

struct CovarianceOptions {
  int bootstrap = 500;
  std::uint64_t seed = 0;
  double rel_tol = 0.15;
  double ci_level = 0.99;
  std::size_t min_replicas = 500;
};

/// Covariance of the centered columns divided by sigma^2, sigma^2 estimated as
/// Var(column at t_max) / t_max; each entry is compared with min(t_i, t_j). An
/// entry passes when its percentile-bootstrap interval meets the band
/// [(1 - rel_tol) min, (1 + rel_tol) min].
TestReport fdd_covariance_report(const SampleMatrix& values, const std::vector<double>& t_positive,
                                 const CovarianceOptions& opts = {});

/// Per-replica sum_j nu_j (values[r][j] - center[j]) * scale.
std::vector<double> cramer_wold_projection(const SampleMatrix& values, const std::vector<double>& center,
                                           const std::vector<double>& coefficients, double scale = 1.0);

struct StopRule {
  enum class Kind { kFixedTime, kFirstPassage };
  Kind kind = Kind::kFixedTime;
  double time = 0.5;   // fixed time t*
  double level = 0.5;  // first time X_t > level ...
  double cap = 0.9;    // ... or this time if earlier passage does not occur

  std::string describe() const;
};

struct ConditionIIOptions {
  std::vector<double> h_values{0.1, 0.05, 0.025, 0.0125};
  double epsilon = 0.5;
  double ceiling = 0.1;
};

/// Estimates P(|X_{T+h} - X_T| >= epsilon) for each h over replicas of the
/// normalized process X (values[r][j] at grid times t_grid[j]). T and T + h must
/// be grid times. The verdict needs the estimates nonincreasing along h_values
/// and the last one below the ceiling. Always labeled a proxy.
TestReport condition_ii_proxy(const SampleMatrix& x, const std::vector<double>& t_grid, const StopRule& rule,
                              const ConditionIIOptions& opts = {});

struct TwoSampleKs {
  double distance = 0.0;
  double p_value = 1.0;
};

/// Two-sample KS with the asymptotic Kolmogorov distribution (Stephens'
/// small-sample correction).
TwoSampleKs two_sample_ks(std::vector<double> a, std::vector<double> b);

/// Sample moments used by the reports.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // n - 1 denominator
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};
Moments sample_moments(const std::vector<double>& x);

}  // namespace stablewalk
