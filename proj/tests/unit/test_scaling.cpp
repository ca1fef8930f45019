#include <cmath>

#include "doctest.h"
#include "stablewalk/error.hpp"
#include "stablewalk/rng.hpp"
#include "stablewalk/scaling.hpp"

using namespace stablewalk;

namespace {

ScalingSpec spec(int d, double alpha) {
  ScalingSpec s;
  s.d = d;
  s.alpha = alpha;
  return s;
}

}  // namespace

TEST_SUITE("scaling") {

TEST_CASE("H_d cases") {
  CHECK(H_d(1, spec(6, 1.0)) == 1.0);
  CHECK(H_d(123456, spec(6, 1.0)) == 1.0);
  // 1000^{3 - 2/0.7} = 1000^{1/7}
  CHECK(H_d(1000, spec(2, 0.7)) == doctest::Approx(std::pow(1000.0, 1.0 / 7.0)).epsilon(1e-12));
  CHECK(H_d(1000, spec(2, 0.7)) == doctest::Approx(2.6827).epsilon(1e-4));
  CHECK(H_d(8, spec(3, 1.0)) == doctest::Approx(761.0 / 280.0).epsilon(1e-14));
  CHECK_THROWS_AS(H_d(10, spec(2, 1.0)), Error);
}

TEST_CASE("F_d cases") {
  CHECK(F_d(8, spec(3, 1.0)) == 1.0);
  CHECK(F_d(8, spec(2, 1.0)) == doctest::Approx(761.0 / 280.0).epsilon(1e-14));
  for (std::int64_t n : {4, 100, 10000}) CHECK(F_d(n, spec(3, 2.0)) == doctest::Approx(std::sqrt(double(n))));
  try {
    F_d(10, spec(1, 1.0));
    FAIL("expected out-of-regime");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfRegime);
  }
}

TEST_CASE("slowly varying factor enters the critical sum") {
  ScalingSpec s = spec(3, 1.0);
  s.ell = ScalingSpec::Ell::kLogPower;
  s.c = 1.0;
  s.gamma = 0.5;
  double sum = 0.0;
  for (int k = 1; k <= 8; ++k) sum += 1.0 / k * std::pow(1.0 + std::log(double(k)), -1.5);
  CHECK(H_d(8, s) == doctest::Approx(sum).epsilon(1e-13));
  CHECK(s.b(8.0) == doctest::Approx(8.0 * std::pow(1.0 + std::log(8.0), 0.5)));
}

TEST_CASE("growth exponent of exact power laws") {
  std::vector<std::pair<double, double>> linear, flat;
  for (double n : {16.0, 32.0, 64.0, 128.0, 256.0}) {
    linear.emplace_back(n, 3.0 * n);
    flat.emplace_back(n, 2.5);
  }
  CHECK(growth_exponent(linear).slope == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(growth_exponent(flat).slope) < 1e-13);
}

TEST_CASE("growth exponent with noise") {
  StreamRng rng(StreamId{31, 0, 0});
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (double n = 16; n <= 4096; n *= 2) pts.emplace_back(n, std::sqrt(n) * (1.0 + 0.01 * rng.normal()));
    const GrowthFit f = growth_exponent(pts);
    CHECK(f.slope >= 0.45);
    CHECK(f.slope <= 0.55);
    CHECK(f.ci_low <= f.slope);
    CHECK(f.ci_high >= f.slope);
  }
}

TEST_CASE("growth exponent input checks") {
  CHECK_THROWS_AS(growth_exponent({{1.0, 1.0}, {2.0, 2.0}}), Error);
  try {
    growth_exponent({{1.0, 1.0}, {2.0, 0.0}, {4.0, 3.0}});
    FAIL("expected nonpositive-value");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonpositiveValue);
  }
}

}
