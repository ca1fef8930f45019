#include <set>

#include "doctest.h"
#include "stablewalk/error.hpp"
#include "stablewalk/site_set.hpp"
#include "stablewalk/walker.hpp"

using namespace stablewalk;

namespace {

StepLaw drift(int d, std::int64_t dir) { return StepLaw::finite(d, {{LatticePoint::unit(d, 0, dir), 1.0}}); }

RangeState scripted(const StepLaw& law, const std::vector<std::int64_t>& steps) {
  RangeState r(law, true);
  LatticePoint p = LatticePoint::origin(law.dim());
  for (auto s : steps) {
    p[0] += s;
    r.advance_to(p);
  }
  return r;
}

}  // namespace

TEST_SUITE("walker") {

TEST_CASE("site set basics") {
  SiteSet s(3, 4);
  CHECK(s.empty());
  CHECK(s.insert(LatticePoint{1, -2, 3}, 5));
  CHECK_FALSE(s.insert(LatticePoint{1, -2, 3}, 9));
  CHECK(s.first_visit(LatticePoint{1, -2, 3}) == 5);
  CHECK(s.first_visit(LatticePoint{0, 0, 0}) == SiteSet::kEmpty);
  for (int i = 0; i < 1000; ++i) s.insert(LatticePoint{i, -i, 2 * i}, i + 10);
  CHECK(s.size() == 1001);
  CHECK(s.first_visit(LatticePoint{500, -500, 1000}) == 510);
  const auto sorted = s.sorted_sites();
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));
  s.clear();
  CHECK(s.size() == 0);
}

TEST_CASE("site set rejects unpackable coordinates") {
  SiteSet s(8);
  LatticePoint far(8);
  far[3] = std::int64_t{1} << 40;
  CHECK_FALSE(s.packable(far));
  CHECK_THROWS_AS(s.insert(far, 0), Error);
}

TEST_CASE("rational grid times are exact") {
  CHECK(Rational::from_decimal(0.25) == Rational{1, 4});
  CHECK(Rational::from_decimal(0.1) == Rational{1, 10});
  CHECK(floor_scaled(4096, Rational::from_decimal(0.1)) == 409);
  CHECK(floor_scaled(100, Rational{1, 3}) == 33);
  CHECK_THROWS_AS(TimeGrid::from_decimals({0.0, 0.5, 0.5}), Error);
  CHECK_THROWS_AS(TimeGrid::from_decimals({0.25, 0.5}), Error);
  CHECK(TimeGrid::from_decimals({0.0, 0.25, 1.0}).floors(10) == std::vector<std::int64_t>{0, 2, 10});
}

TEST_CASE("floor inequality on grid indices") {
  // floor(x - y) <= floor(x) - floor(y) <= floor(x - y) + 1 for x = n t, y = n s.
  for (std::int64_t n : {1, 7, 100, 4096}) {
    for (std::int64_t a = 0; a <= 20; ++a) {
      for (std::int64_t b = 0; b <= a; ++b) {
        const Rational t{a, 20}, s{b, 20}, diff{a - b, 20};
        const auto lhs = floor_scaled(n, diff);
        const auto mid = floor_scaled(n, t) - floor_scaled(n, s);
        REQUIRE(lhs <= mid);
        REQUIRE(mid <= lhs + 1);
      }
    }
  }
}

TEST_CASE("zero steps") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const RangeState r = simulate_path(law, 0, 1);
  CHECK(r.position().is_origin());
  CHECK(r.cardinality() == 1);
}

TEST_CASE("drifting walk visits n + 1 sites") {
  const RangeState r = simulate_path(drift(2, 1), 10, 1);
  CHECK(r.cardinality() == 11);
  CHECK(r.position() == LatticePoint{10, 0});
}

TEST_CASE("same seed, same visited set") {
  const StepLaw law = StepLaw::axial_power_law(3, 0.7, 0.25);
  const RangeState a = simulate_path(law, 500, walk_stream(9, 4), true);
  const RangeState b = simulate_path(law, 500, walk_stream(9, 4), true);
  CHECK(a.visited().sorted_sites() == b.visited().sorted_sites());
  CHECK(a.path_log() == b.path_log());
  const RangeState c = simulate_path(law, 500, walk_stream(9, 5), true);
  CHECK(a.path_log() != c.path_log());
}

TEST_CASE("range cardinality process") {
  const StepLaw law = drift(2, 1);
  const auto single = range_cardinality_process(law, 100, TimeGrid::from_decimals({0.0}), 1);
  CHECK(single.range_values == std::vector<std::int64_t>{1});
  const auto three = range_cardinality_process(law, 100, TimeGrid::from_decimals({0.0, 0.5, 1.0}), 1);
  CHECK(three.range_values == std::vector<std::int64_t>{1, 51, 101});
  CHECK(three.floor_nt == std::vector<std::int64_t>{0, 50, 100});
}

TEST_CASE("range grows by at most one per step") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const auto grid = TimeGrid::from_decimals({0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0});
  for (std::uint64_t rep = 0; rep < 50; ++rep) {
    const auto s = range_cardinality_process(law, 800, grid, 11, rep);
    for (std::size_t i = 1; i < s.range_values.size(); ++i) {
      REQUIRE(s.range_values[i] >= s.range_values[i - 1]);
      REQUIRE(s.range_values[i] - s.range_values[i - 1] <= s.floor_nt[i] - s.floor_nt[i - 1]);
    }
  }
}

TEST_CASE("intersections of degenerate paths") {
  const StepLaw still = StepLaw::finite(2, {{LatticePoint{0, 0}, 1.0}});
  CHECK(intersect_count(simulate_path(still, 20, 1, true), simulate_path(still, 20, 2, true)) == 1);
  const RangeState right = simulate_path(drift(2, 1), 30, 1, true);
  const RangeState left = simulate_path(drift(2, -1), 30, 1, true);
  CHECK(intersect_count(right, left) == 1);
  CHECK(intersection_profile(right, left, {0, 10, 30}) == std::vector<std::int64_t>{1, 1, 1});
}

TEST_CASE("intersection profile is nondecreasing") {
  const StepLaw law = StepLaw::axial_power_law(2, 1.0, 0.25);
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const RangeState a = simulate_path(law, 512, walk_stream(3, rep), true);
    const RangeState b = simulate_path(law, 512, walk_stream(4, rep), true);
    const auto prof = intersection_profile(a, b, {0, 8, 64, 128, 512});
    CHECK(prof.front() == 1);
    CHECK(std::is_sorted(prof.begin(), prof.end()));
    CHECK(prof.back() == static_cast<std::int64_t>(intersect_count(a, b)));
  }
}

TEST_CASE("hand-enumerated range decomposition") {
  const RangeState r = scripted(StepLaw::lazy_simple(1, 0.5), {+1, -1, +1, +1});
  const RangeDecomposition d = decompose_range(r, 2, 2);
  CHECK(d.card_m == 2);
  CHECK(d.card_shifted_n == 3);
  CHECK(d.overlap == 2);
  CHECK(d.card_total == 3);
  CHECK(d.identity_holds());
  CHECK_THROWS_AS(decompose_range(r, 3, 2), Error);
}

TEST_CASE("degenerate split at m = 0") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const RangeState r = simulate_path(law, 64, 5, true);
  const RangeDecomposition d = decompose_range(r, 0, 64);
  CHECK(d.card_m == 1);
  CHECK(d.overlap == 1);
  CHECK(d.card_shifted_n == d.card_total);
  CHECK(d.card_total == static_cast<std::int64_t>(r.cardinality()));
}

TEST_CASE("decomposition identity on random paths") {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  for (std::uint64_t rep = 0; rep < 2000; ++rep) {
    const RangeState r = simulate_path(law, 128, walk_stream(21, rep), true);
    for (std::int64_t m : {0, 1, 17, 64, 127}) REQUIRE(decompose_range(r, m, 128 - m).identity_holds());
  }
}

}
