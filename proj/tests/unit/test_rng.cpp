#include <array>
#include <cmath>
#include <set>

#include "doctest.h"
#include "stablewalk/rng.hpp"

using namespace stablewalk;

TEST_SUITE("rng") {

// Known-answer vectors of Philox4x32-10 (Salmon et al. reference suite).
TEST_CASE("philox known answers") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::apply(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::apply(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible") {
  StreamRng a(StreamId{7, 3, 1});
  StreamRng b(StreamId{7, 3, 1});
  for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());
}

TEST_CASE("distinct stream ids give distinct streams") {
  std::set<std::uint64_t> first;
  int count = 0;
  for (std::uint64_t m : {0ULL, 1ULL, 2ULL}) {
    for (std::uint64_t r : {std::uint64_t{0}, std::uint64_t{1}, stream_tag(StreamPurpose::kEscape, 0), stream_tag(StreamPurpose::kEscape, 1)}) {
      for (std::uint64_t p : {0ULL, 1ULL, 256ULL}) {
        StreamRng g(StreamId{m, r, p});
        first.insert(g());
        ++count;
      }
    }
  }
  CHECK(first.size() == static_cast<std::size_t>(count));
}

TEST_CASE("purpose tags occupy the top byte") {
  CHECK(stream_tag(StreamPurpose::kWalk, 5) == 5);
  CHECK((stream_tag(StreamPurpose::kBootstrap, 5) >> 56) == 10);
  CHECK((stream_tag(StreamPurpose::kEscape, ~0ULL) >> 56) == 1);
}

TEST_CASE("uniform draws stay in range and look uniform") {
  StreamRng g(StreamId{99, 0, 0});
  const int n = 200000;
  double sum = 0.0;
  std::array<int, 7> bins{};
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(g.uniform_open01() > 0.0);
    sum += u;
    const auto k = g.below(7);
    REQUIRE(k < 7);
    ++bins[k];
  }
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  for (int c : bins) CHECK(std::abs(c - n / 7.0) < 5.0 * std::sqrt(n / 7.0));
}

TEST_CASE("normal draws have unit variance") {
  StreamRng g(StreamId{5, 0, 0});
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    s1 += z;
    s2 += z * z;
  }
  CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

}
