#include <cmath>

#include "doctest.h"
#include "stablewalk/capacity.hpp"
#include "stablewalk/error.hpp"

using namespace stablewalk;

namespace {

const StepLaw& law2() {
  static const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  return law;
}

const QuadratureGreen& green2() {
  static const QuadratureGreen q(law2(), 16, QuadratureOptions{1e-8});
  return q;
}

std::vector<LatticePoint> random_set(StreamRng& rng, std::size_t size, std::int64_t radius) {
  std::vector<LatticePoint> a;
  for (std::size_t i = 0; i < size; ++i) {
    a.push_back(LatticePoint{static_cast<std::int64_t>(rng.below(2 * radius + 1)) - radius,
                             static_cast<std::int64_t>(rng.below(2 * radius + 1)) - radius});
  }
  return a;
}

}  // namespace

TEST_SUITE("capacity") {

TEST_CASE("singleton and pair") {
  const double g0 = green2().evaluate(LatticePoint{0, 0}).value;
  const CapacityEstimate one = equilibrium_capacity({LatticePoint{0, 0}}, green2());
  CHECK(one.value == doctest::Approx(1.0 / g0).epsilon(1e-14));
  CHECK(one.error_bound <= 1e-7);
  const LatticePoint x{3, -1};
  const double gx = green2().evaluate(x).value;
  const CapacityEstimate two = equilibrium_capacity({LatticePoint{0, 0}, x}, green2());
  CHECK(two.value == doctest::Approx(2.0 / (g0 + gx)).epsilon(1e-12));
  CHECK(two.equilibrium[0] == doctest::Approx(two.equilibrium[1]));
}

TEST_CASE("empty set and duplicates") {
  CHECK(equilibrium_capacity({}, green2()).value == 0.0);
  const CapacityEstimate dup =
      equilibrium_capacity({LatticePoint{1, 1}, LatticePoint{1, 1}, LatticePoint{0, 0}}, green2());
  CHECK(dup.set_size == 2);
  CHECK(dup.value == doctest::Approx(equilibrium_capacity({LatticePoint{0, 0}, LatticePoint{1, 1}}, green2()).value));
}

TEST_CASE("translation invariance and monotonicity") {
  StreamRng rng(StreamId{4, 0, 0});
  for (int trial = 0; trial < 30; ++trial) {
    auto a = random_set(rng, 1 + rng.below(6), 4);
    const CapacityEstimate ca = equilibrium_capacity(a, green2());
    auto shifted = a;
    for (auto& p : shifted) p += LatticePoint{2, -1};
    const CapacityEstimate cs = equilibrium_capacity(shifted, green2());
    CHECK(std::abs(ca.value - cs.value) <= ca.error_bound + cs.error_bound + 1e-12);
    auto bigger = a;
    bigger.push_back(LatticePoint{static_cast<std::int64_t>(rng.below(9)) - 4, 5});
    const CapacityEstimate cb = equilibrium_capacity(bigger, green2());
    CHECK(cb.value >= ca.value - ca.error_bound - cb.error_bound);
    CHECK(cb.value <= ca.value + 1.0 + ca.error_bound + cb.error_bound);
    CHECK(ca.value <= static_cast<double>(ca.set_size));
    for (double e : ca.equilibrium) CHECK(e > 0.0);
  }
}

TEST_CASE("prefix capacities are monotone with unit increments") {
  const StepLaw law = StepLaw::lazy_simple(6, 0.5);
  const QuadratureGreen q(law, 32);
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const RangeState p = simulate_path(law, 32, walk_stream(6, rep), true);
    const PrefixCapacities c = path_capacities(p, q);
    REQUIRE(c.values.size() == 33);
    CHECK(c.values[0] == doctest::Approx(1.0 / q.evaluate(LatticePoint::origin(6)).value));
    for (std::size_t k = 0; k + 1 < c.values.size(); ++k) {
      REQUIRE(c.values[k + 1] >= c.values[k]);
      REQUIRE(c.values[k + 1] - c.values[k] <= 1.0 + c.errors[k] + c.errors[k + 1]);
    }
    const CapacityEstimate full = equilibrium_capacity(p.visited().sorted_sites(), q);
    CHECK(c.values.back() == doctest::Approx(full.value).epsilon(1e-10));
  }
  const RangeState no_log = simulate_path(law, 4, 1, false);
  CHECK_THROWS_AS(path_capacities(no_log, q), Error);
}

TEST_CASE("escape estimator on a drifting walk") {
  const StepLaw right = StepLaw::finite(2, {{LatticePoint{1, 0}, 1.0}});
  EscapeOptions o;
  o.horizon = 1000;
  o.trials_per_point = 2000;
  const CapacityEstimate c = mc_escape_capacity({LatticePoint{0, 0}}, right, 1, o);
  CHECK(c.value == 1.0);
  CHECK(c.std_error == 0.0);
}

TEST_CASE("escape estimator never exceeds the set size") {
  EscapeOptions o;
  o.horizon = 2000;
  o.trials_per_point = 2000;
  StreamRng rng(StreamId{10, 0, 0});
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto a = random_set(rng, 1 + rng.below(4), 3);
    const CapacityEstimate c = mc_escape_capacity(a, law2(), s, o);
    CHECK(c.value <= static_cast<double>(c.set_size) + 3.0 * c.std_error);
    CHECK(c.std_error > 0.0);
  }
}

TEST_CASE("escape estimator matches 1/G(0,0)") {
  EscapeOptions o;
  o.horizon = 100000;
  o.trials_per_point = 20000;
  const CapacityEstimate c = mc_escape_capacity({LatticePoint{0, 0}}, law2(), 2024, o);
  const GreenValue g = green2().evaluate(LatticePoint{0, 0});
  CHECK(std::abs(c.value - 1.0 / g.value) <= 3.0 * c.std_error + g.error);
}

TEST_CASE("escape estimator is worker independent") {
  EscapeOptions o;
  o.horizon = 5000;
  o.trials_per_point = 500;
  const std::vector<LatticePoint> a{LatticePoint{0, 0}, LatticePoint{2, 1}, LatticePoint{-1, 3}};
  o.workers = 1;
  const CapacityEstimate one = mc_escape_capacity(a, law2(), 77, o);
  o.workers = 3;
  const CapacityEstimate three = mc_escape_capacity(a, law2(), 77, o);
  CHECK(one.value == three.value);
  CHECK(one.std_error == three.std_error);
}

TEST_CASE("capacity process at t = 0") {
  CapacityProcessConfig cfg;
  cfg.estimator = CapacityMethod::kEquilibriumSolve;
  cfg.green = &green2();
  const auto s = capacity_process(law2(), 16, TimeGrid::from_decimals({0.0}), cfg, 1);
  REQUIRE(s.cap_values.size() == 1);
  CHECK(s.cap_values[0] == doctest::Approx(1.0 / green2().evaluate(LatticePoint{0, 0}).value));
}

TEST_CASE("escape-based capacity process is monotone and below the range") {
  CapacityProcessConfig cfg;
  const auto grid = TimeGrid::from_decimals({0.0, 0.25, 0.5, 0.75, 1.0});
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const auto s = capacity_process(law2(), 400, grid, cfg, 5, rep);
    for (std::size_t i = 0; i < s.cap_values.size(); ++i) {
      CHECK(s.cap_values[i] <= static_cast<double>(s.range_values[i]));
      if (i > 0) CHECK(s.cap_values[i] >= s.cap_values[i - 1]);
    }
  }
}

TEST_CASE("decomposition bounds") {
  const LatticePoint o{0, 0}, x{12, 0};
  const DecompositionReport empty = decomposition_bounds_check({o, LatticePoint{1, 0}}, {}, green2());
  CHECK(empty.cap_b.value == 0.0);
  CHECK(std::abs(empty.upper_slack) <= empty.tolerance);
  CHECK(std::abs(empty.lower_slack) <= empty.tolerance);
  CHECK(empty.subadditive);
  CHECK(empty.lower_bound);

  const DecompositionReport far = decomposition_bounds_check({o}, {x}, green2());
  const double g0 = green2().evaluate(o).value;
  const double gx = green2().evaluate(x).value;
  CHECK(far.cap_union.value <= 2.0 / g0 + far.tolerance);
  CHECK(far.cap_union.value >= 2.0 / g0 - 2.0 * gx - far.tolerance);
  CHECK(far.subadditive);
  CHECK(far.lower_bound);

  StreamRng rng(StreamId{12, 0, 0});
  for (int i = 0; i < 50; ++i) {
    const auto a = random_set(rng, 1 + rng.below(8), 6);
    const auto b = random_set(rng, 1 + rng.below(8), 6);
    const DecompositionReport r = decomposition_bounds_check(a, b, green2());
    REQUIRE(r.subadditive);
    REQUIRE(r.lower_bound);
  }
}

TEST_CASE("method names") {
  CHECK(capacity_method_from_string(to_string(CapacityMethod::kMcEscape)) == CapacityMethod::kMcEscape);
  CHECK(capacity_method_from_string(to_string(CapacityMethod::kEquilibriumSolve)) == CapacityMethod::kEquilibriumSolve);
  CHECK_THROWS_AS(capacity_method_from_string("monte-carlo"), Error);
}

}
