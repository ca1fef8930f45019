#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "doctest.h"
#include "stablewalk/error.hpp"
#include "stablewalk/green.hpp"

using namespace stablewalk;

TEST_SUITE("green") {

TEST_CASE("loop atom bounds the diagonal from below") {
  for (double alpha : {0.5, 0.7, 1.2}) {
    const StepLaw law = StepLaw::axial_power_law(2, alpha, 0.25);
    const QuadratureGreen q(law, 2);
    CHECK(q.evaluate(LatticePoint{0, 0}).value >= 4.0 / 3.0 - q.tolerance());
  }
}

TEST_CASE("symmetry under x -> -x") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const QuadratureGreen q(law, 8);
  StreamRng rng(StreamId{8, 0, 0});
  for (int i = 0; i < 20; ++i) {
    const LatticePoint x{static_cast<std::int64_t>(rng.below(17)) - 8, static_cast<std::int64_t>(rng.below(17)) - 8};
    CHECK(std::abs(q.evaluate(x).value - q.evaluate(-x).value) <= 2.0 * q.tolerance());
  }
}

TEST_CASE("simple law axis kernel is a scaled Bessel function") {
  // 1 - psi(t) = 1 - cos t, so k_s(m) = e^{-s} I_m(s).
  const QuadratureGreen q(StepLaw::lazy_simple(3, 0.5), 6);
  for (double s : {0.05, 0.5, 2.0, 10.0}) {
    for (std::int64_t m : {0, 1, 3, 6}) {
      const double exact = std::exp(-s) * boost::math::cyl_bessel_i(static_cast<double>(m), s);
      CAPTURE(s);
      CAPTURE(m);
      CHECK(std::abs(q.axis_kernel(s, m) - exact) <= 1e-9 * exact + 1e-15);
    }
  }
}

TEST_CASE("three-dimensional simple walk reproduces Watson's integral") {
  // G(0,0) = 1.5163860591519780 for the simple walk; a loop atom p0 scales it by 1/(1 - p0).
  const QuadratureGreen q(StepLaw::lazy_simple(3, 0.5), 1, QuadratureOptions{1e-7});
  const GreenValue g = q.evaluate(LatticePoint{0, 0, 0});
  CHECK(std::abs(g.value - 2.0 * 1.5163860591519780) <= g.error + 1e-12);
  CHECK(g.error <= 1e-7);
}

TEST_CASE("quadrature against the convolution oracle") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const QuadratureGreen q(law, 2);
  const GreenTable oracle = convolution_green_oracle(law, 2, 256);
  for (const LatticePoint& x : {LatticePoint{0, 0}, LatticePoint{1, 0}, LatticePoint{1, 1}}) {
    const GreenValue a = q.evaluate(x);
    const GreenValue b = oracle.evaluate(x);
    CAPTURE(x.to_string());
    CHECK(std::abs(a.value - b.value) <= a.error + b.error);
  }
}

TEST_CASE("oracle partial sums at short horizons") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const GreenTable h0 = convolution_green_oracle(law, 4, 0);
  CHECK(h0.return_probabilities.at(0) == 1.0);
  CHECK(h0.evaluate(LatticePoint{0, 0}).value == 1.0);
  const GreenTable h1 = convolution_green_oracle(law, 4, 1);
  CHECK(h1.evaluate(LatticePoint{0, 0}).value == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(h1.evaluate(LatticePoint{2, 0}).value == doctest::Approx(law.probability(LatticePoint{2, 0})).epsilon(1e-12));
}

TEST_CASE("wide-box oracle agrees at the origin") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const GreenTable oracle = convolution_green_oracle(law, 64, 256);
  const GreenValue o = oracle.evaluate(LatticePoint{0, 0});
  const GreenValue g = quadrature_green(law, LatticePoint{0, 0}, 1e-6);
  CHECK(std::abs(o.value - g.value) <= o.error + g.error);
}

TEST_CASE("lazy simple d = 6 against the oracle") {
  const StepLaw law = StepLaw::lazy_simple(6, 0.5);
  const QuadratureGreen q(law, 3);
  const GreenTable oracle = convolution_green_oracle(law, 3, 512);
  for (const auto& [x, o] : oracle.entries()) {
    const GreenValue a = q.evaluate(x);
    REQUIRE(std::abs(a.value - o.value) <= a.error + o.error);
  }
}

TEST_CASE("canonical representatives") {
  CHECK(canonical_points(2, 8).size() == 45);
  CHECK(canonical_points(6, 8).size() == 3003);
  const QuadratureGreen q(StepLaw::axial_power_law(3, 0.7, 0.25), 4);
  CHECK(q.evaluate(LatticePoint{-3, 1, 2}).value == q.evaluate(LatticePoint{1, 2, 3}).value);
}

TEST_CASE("Green function decreases away from the origin along an axis") {
  const QuadratureGreen q(StepLaw::axial_power_law(2, 0.7, 0.25), 8);
  for (std::int64_t r = 0; r < 8; ++r) {
    CHECK(q.evaluate(LatticePoint{r, 0}).value > q.evaluate(LatticePoint{r + 1, 0}).value);
  }
}

TEST_CASE("out-of-range displacement") {
  const QuadratureGreen q(StepLaw::axial_power_law(2, 0.7, 0.25), 3);
  try {
    q.evaluate(LatticePoint{4, 0});
    FAIL("expected displacement-out-of-range");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDisplacementOutOfRange);
  }
}

TEST_CASE("mutual energy") {
  const QuadratureGreen q(StepLaw::axial_power_law(2, 0.7, 0.25), 8);
  const LatticePoint o{0, 0}, x{2, -1};
  CHECK(mutual_energy({o}, {o}, q).value == q.evaluate(o).value);
  CHECK(mutual_energy({o}, {x}, q).value == q.evaluate(x).value);
  const std::vector<LatticePoint> a{o, LatticePoint{1, 1}};
  const std::vector<LatticePoint> b1{LatticePoint{3, 0}, LatticePoint{0, 4}};
  const std::vector<LatticePoint> b2{LatticePoint{-2, 2}};
  std::vector<LatticePoint> b = b1;
  b.insert(b.end(), b2.begin(), b2.end());
  CHECK(mutual_energy(a, b, q).value ==
        doctest::Approx(mutual_energy(a, b1, q).value + mutual_energy(a, b2, q).value).epsilon(1e-14));
}

TEST_CASE("cross Green estimate") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const QuadratureGreen q(law, 8);
  CrossGreenOptions o;
  o.max_n = 64;
  const auto pts = cross_green_estimate(law, q, {0, 8, 16, 32, 64}, 40, 3, o);
  REQUIRE(pts.size() == 5);
  CHECK(pts[0].mean == q.evaluate(LatticePoint{0, 0}).value);
  CHECK(pts[0].std_error == 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].mean >= pts[i - 1].mean);
}

TEST_CASE("table serializes canonical entries") {
  const QuadratureGreen q(StepLaw::axial_power_law(2, 0.7, 0.25), 3);
  const GreenTable t = tabulate(q, 3);
  CHECK(t.entries().size() == 10);
  CHECK(t.evaluate(LatticePoint{-1, 3}).value == q.evaluate(LatticePoint{1, 3}).value);
  CHECK(t.tolerance() <= q.tolerance());
}

}
