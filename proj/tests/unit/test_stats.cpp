#include <cmath>

#include "doctest.h"
#include "stablewalk/error.hpp"
#include "stablewalk/rng.hpp"
#include "stablewalk/stats.hpp"

using namespace stablewalk;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n) {
  StreamRng rng(StreamId{seed, stream_tag(StreamPurpose::kSynthetic, 0), 0});
  std::vector<double> z(n);
  for (auto& v : z) v = rng.normal();
  return z;
}

// Brownian motion with variance `scale * t` sampled at `times`.
SampleMatrix brownian(std::uint64_t seed, std::size_t m, const std::vector<double>& times, double scale = 1.0) {
  StreamRng rng(StreamId{seed, stream_tag(StreamPurpose::kSynthetic, 1), 0});
  SampleMatrix out(m, std::vector<double>(times.size()));
  for (auto& row : out) {
    double x = 0.0, prev = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      x += std::sqrt(scale * (times[j] - prev)) * rng.normal();
      prev = times[j];
      row[j] = x;
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("normal cdf and quantile") {
  CHECK(standard_normal_cdf(0.0) == 0.5);
  CHECK(standard_normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
  CHECK(standard_normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-13));
  for (double p : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) {
    CHECK(standard_normal_cdf(standard_normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("sample moments") {
  const Moments m = sample_moments({1.0, 2.0, 3.0, 4.0, 10.0});
  CHECK(m.mean == doctest::Approx(4.0));
  CHECK(m.variance == doctest::Approx(12.5));
  // g1 = m3 / m2^{3/2}, g2 = m4 / m2^2 - 3 with m2 = 10, m3 = 36, m4 = 278.8.
  CHECK(m.skewness == doctest::Approx(36.0 / std::pow(10.0, 1.5)).epsilon(1e-12));
  CHECK(m.excess_kurtosis == doctest::Approx(2.788 - 3.0).epsilon(1e-12));
}

TEST_CASE("KS distance of a perfect sample") {
  std::vector<double> q;
  const int n = 1000;
  for (int i = 0; i < n; ++i) q.push_back(standard_normal_quantile((i + 0.5) / n));
  CHECK(ks_distance_normal(q) == doctest::Approx(0.5 / n).epsilon(1e-9));
}

TEST_CASE("normality calibration over seeds") {
  NormalityOptions o;
  o.bootstrap = 200;
  int rejections = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    o.seed = 1000 + s;
    rejections += normality_report(normals(s, 2000), o).stat("ks_p_value") <= 0.01;
  }
  // Expected one rejection; P(Binomial(100, 0.01) >= 5) < 0.004.
  CHECK(rejections <= 4);
}

TEST_CASE("normality report rejects exponential samples") {
  NormalityOptions o;
  o.bootstrap = 200;
  for (std::uint64_t s = 0; s < 20; ++s) {
    StreamRng rng(StreamId{s, 0, 0});
    std::vector<double> x(2000);
    for (auto& v : x) v = -std::log(rng.uniform_open01());
    o.seed = s;
    const TestReport r = normality_report(x, o);
    CHECK(r.stat("ks_p_value") < 0.01);
    CHECK_FALSE(r.passed());
  }
}

TEST_CASE("normality report guards") {
  CHECK_THROWS_AS(normality_report(std::vector<double>(500, 3.0)), Error);
  try {
    normality_report(normals(1, 50));
    FAIL("expected insufficient-replicas");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientReplicas);
  }
  try {
    normality_report(std::vector<double>(500, 3.0));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateSample);
  }
}

TEST_CASE("normality report is location and scale free") {
  auto z = normals(5, 1000);
  NormalityOptions o;
  o.bootstrap = 100;
  const TestReport a = normality_report(z, o);
  for (auto& v : z) v = 3.0 * v - 7.0;
  const TestReport b = normality_report(z, o);
  CHECK(a.stat("ks_distance") == doctest::Approx(b.stat("ks_distance")).epsilon(1e-9));
  CHECK(a.stat("ks_p_value") == b.stat("ks_p_value"));
}

TEST_CASE("Brownian covariance") {
  const std::vector<double> t{0.25, 0.5, 0.75, 1.0};
  CovarianceOptions o;
  o.bootstrap = 200;
  o.rel_tol = 0.10;
  const TestReport r = fdd_covariance_report(brownian(3, 5000, t), t, o);
  CHECK(r.passed());
  CHECK(r.stat("worst_relative_deviation") < 0.10);
  CHECK(r.stat("cov_3_3") == doctest::Approx(1.0).epsilon(1e-12));
  const TestReport scaled = fdd_covariance_report(brownian(3, 5000, t, 2.0), t, o);
  CHECK(scaled.passed() == r.passed());
  CHECK(scaled.stat("cov_0_1") == doctest::Approx(r.stat("cov_0_1")).epsilon(1e-9));
}

TEST_CASE("covariance guard") {
  const std::vector<double> t{0.5, 1.0};
  try {
    fdd_covariance_report(brownian(1, 10, t), t);
    FAIL("expected insufficient-replicas");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientReplicas);
  }
}

TEST_CASE("Cramer-Wold projections") {
  const std::vector<double> t{0.5, 1.0};
  const SampleMatrix x = brownian(9, 20000, t);
  const std::vector<double> zero_center{0.0, 0.0};
  const auto first = cramer_wold_projection(x, zero_center, {1.0, 0.0});
  for (std::size_t r = 0; r < x.size(); ++r) REQUIRE(first[r] == x[r][0]);
  for (double v : cramer_wold_projection(x, zero_center, {0.0, 0.0})) REQUIRE(v == 0.0);
  const auto inc = cramer_wold_projection(x, zero_center, {-1.0, 1.0});
  CHECK(sample_moments(inc).variance == doctest::Approx(0.5).epsilon(0.10));
  CHECK_THROWS_AS(cramer_wold_projection(x, zero_center, {1.0}), Error);
}

TEST_CASE("condition (ii) proxy on Brownian paths") {
  std::vector<double> t;
  for (int j = 0; j <= 80; ++j) t.push_back(j / 80.0);
  const SampleMatrix x = brownian(17, 4000, t);
  for (const StopRule rule : {StopRule{StopRule::Kind::kFixedTime, 0.5, 0.5, 0.9},
                              StopRule{StopRule::Kind::kFirstPassage, 0.5, 0.5, 0.9}}) {
    ConditionIIOptions o;
    o.h_values = {0.1, 0.05, 0.025, 0.0125};
    const TestReport r = condition_ii_proxy(x, t, rule, o);
    CHECK(r.proxy);
    CHECK(r.passed());
    o.h_values = {0.0};
    CHECK(condition_ii_proxy(x, t, rule, o).stat("p_h=0.000000") == 0.0);
    o.h_values = {0.1, 0.05};
    o.epsilon = 1e6;
    const TestReport huge = condition_ii_proxy(x, t, rule, o);
    for (const auto& s : huge.statistics) {
      if (s.name.rfind("p_h=", 0) == 0) CHECK(s.value == 0.0);
    }
  }
  ConditionIIOptions off;
  off.h_values = {0.013};
  CHECK_THROWS_AS(condition_ii_proxy(x, t, StopRule{}, off), Error);
}

TEST_CASE("two-sample KS") {
  int rejections = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    rejections += two_sample_ks(normals(2 * s, 500), normals(2 * s + 1, 700)).p_value < 0.05;
  }
  CHECK(rejections <= 12);  // Binomial(100, 0.05): P(X > 12) < 0.003
  auto shifted = normals(1, 1000);
  for (auto& v : shifted) v += 0.5;
  CHECK(two_sample_ks(normals(2, 1000), shifted).p_value < 1e-6);
  CHECK(two_sample_ks({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}).distance == 0.0);
}

}
