#include <cmath>
#include <map>

#include "doctest.h"
#include "stablewalk/error.hpp"
#include "stablewalk/special.hpp"
#include "stablewalk/step_law.hpp"

using namespace stablewalk;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_SUITE("stepkit") {

TEST_CASE("zeta values") {
  CHECK(riemann_zeta(2.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-13));
  CHECK(riemann_zeta(-1.0) == doctest::Approx(-1.0 / 12.0).epsilon(1e-12));
  CHECK(hurwitz_zeta(2.0, 1.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-13));
  // zeta(s, 1/2) = (2^s - 1) zeta(s)
  CHECK(hurwitz_zeta(3.0, 0.5) == doctest::Approx(7.0 * riemann_zeta(3.0)).epsilon(1e-12));
}

TEST_CASE("power-law characteristic matches the cosine series") {
  for (double alpha : {0.5, 0.7, 1.0, 1.3, 1.5}) {
    const PowerLawCharacteristic chi(alpha);
    for (double theta : {0.01, 0.1, 0.5, 1.0, 2.0, 3.0, M_PI}) {
      const double direct = PowerLawCharacteristic::direct_series(alpha, theta, 2000000);
      CAPTURE(alpha);
      CAPTURE(theta);
      CHECK(chi.one_minus_psi(theta) == doctest::Approx(direct).epsilon(1e-6));
    }
    CHECK(chi.one_minus_psi(0.0) == 0.0);
    CHECK(chi.one_minus_psi(-0.3) == chi.one_minus_psi(0.3));
  }
}

TEST_CASE("binomial rows sum to one") {
  const auto rows = binomial_rows(60, 0.3);
  for (const auto& row : rows) {
    double s = 0.0;
    for (double v : row) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(rows[2][1] == doctest::Approx(2 * 0.3 * 0.7));
}

TEST_CASE("axial power law probabilities") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  CHECK(law.probability(LatticePoint{0, 0}) == 0.25);
  const double p1 = law.probability(LatticePoint{1, 0});
  CHECK(law.probability(LatticePoint{0, -1}) == doctest::Approx(p1));
  CHECK(law.probability(LatticePoint{3, 0}) / p1 == doctest::Approx(std::pow(3.0, -1.7)));
  CHECK(law.probability(LatticePoint{1, 1}) == 0.0);
  CHECK(p1 == doctest::Approx(0.75 / 4.0 / riemann_zeta(1.7)));
  double total = law.mass_outside(64);
  for (const auto& [z, p] : law.support_within(64)) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(law.is_symmetric());
}

TEST_CASE("lazy simple probabilities") {
  const StepLaw law = StepLaw::lazy_simple(6, 0.5);
  CHECK(law.probability(LatticePoint::origin(6)) == 0.5);
  for (int i = 0; i < 6; ++i) {
    CHECK(law.probability(LatticePoint::unit(6, i)) == doctest::Approx(1.0 / 24.0));
    CHECK(law.probability(LatticePoint::unit(6, i, -1)) == doctest::Approx(1.0 / 24.0));
  }
  CHECK(law.probability(LatticePoint::unit(6, 0, 2)) == 0.0);
}

TEST_CASE("parameter validation") {
  CHECK(code_of([] { build_step_law(2, 2.5, 0.25, LawFamily::kAxialPowerLaw); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([] { build_step_law(2, 0.7, 1.5, LawFamily::kAxialPowerLaw); }) == ErrorCode::kInvalidParameter);
  CHECK(code_of([] { build_step_law(2, 1.0, 0.5, LawFamily::kLazySimple); }) == ErrorCode::kFamilyMismatch);
  CHECK(code_of([] { law_family_from_string("gaussian"); }) == ErrorCode::kInvalidParameter);
}

TEST_CASE("point-mass law never moves") {
  const StepLaw law = StepLaw::finite(2, {{LatticePoint{0, 0}, 1.0}});
  StreamRng rng(StreamId{1, 0, 0});
  for (int i = 0; i < 1000; ++i) REQUIRE(law.sample(rng).is_origin());
}

TEST_CASE("origin frequency") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  StreamRng rng(StreamId{2024, 0, 0});
  const int n = 1000000;
  int zero = 0;
  for (int i = 0; i < n; ++i) zero += law.sample(rng).is_origin();
  CHECK(std::abs(zero / double(n) - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("symmetric law has zero mean when the mean exists") {
  const StepLaw law = StepLaw::axial_power_law(2, 1.5, 0.25);
  StreamRng rng(StreamId{77, 0, 0});
  const int n = 1000000;
  for (int axis = 0; axis < 2; ++axis) {
    StreamRng g(StreamId{77, static_cast<std::uint64_t>(axis), 0});
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(law.sample(g)[axis]);
      s1 += x;
      s2 += x * x;
    }
    const double mean = s1 / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean) <= 4.0 * se);
  }
}

TEST_CASE("single-step frequencies match the law") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  StreamRng rng(StreamId{3, 0, 0});
  const int n = 400000;
  std::map<LatticePoint, int> counts;
  for (int i = 0; i < n; ++i) ++counts[law.sample(rng)];
  for (const LatticePoint& z : {LatticePoint{1, 0}, LatticePoint{-2, 0}, LatticePoint{0, 5}}) {
    const double p = law.probability(z);
    CHECK(std::abs(counts[z] - n * p) <= 4.0 * std::sqrt(n * p * (1 - p)));
  }
}

TEST_CASE("aperiodicity") {
  CHECK(check_aperiodicity(StepLaw::axial_power_law(3, 0.7, 0.25)));
  CHECK(check_aperiodicity(StepLaw::lazy_simple(4, 0.5)));
  const StepLaw even = StepLaw::finite(
      2, {{LatticePoint{2, 0}, 0.25}, {LatticePoint{-2, 0}, 0.25}, {LatticePoint{0, 2}, 0.25}, {LatticePoint{0, -2}, 0.25}});
  CHECK_FALSE(check_aperiodicity(even));
  CHECK(generates_full_lattice(2, {LatticePoint{2, 1}, LatticePoint{1, 1}}));
  CHECK_FALSE(generates_full_lattice(2, {LatticePoint{2, 0}, LatticePoint{0, 1}}));
}

TEST_CASE("transience classification") {
  CHECK(transience_class(2, 0.7) == TransienceClass::kStronglyTransient);
  CHECK(transience_class(3, 2.0) == TransienceClass::kTransient);
  CHECK(transience_class(1, 2.0) == TransienceClass::kNotImplied);
  CHECK(transience_class(4, 2.0) == TransienceClass::kTransient);
}

TEST_CASE("fingerprint identifies parameters") {
  CHECK(StepLaw::axial_power_law(2, 0.7, 0.25).fingerprint() == StepLaw::axial_power_law(2, 0.7, 0.25).fingerprint());
  CHECK(StepLaw::axial_power_law(2, 0.7, 0.25).fingerprint() != StepLaw::axial_power_law(2, 0.7, 0.3).fingerprint());
}

}
