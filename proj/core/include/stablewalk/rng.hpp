#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace stablewalk {

/// Philox4x32-10 counter-based bijection. Used only to derive independent
/// stream states from (master seed, stream ids); the per-stream generator is
/// xoshiro256**.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

/// Stream identifier. Derivation is injective in (master, replica, point):
/// the 128-bit counter (replica, point) is mapped through a keyed bijection.
struct StreamId {
  std::uint64_t master = 0;
  std::uint64_t replica = 0;
  std::uint64_t point = 0;
};

/// Purpose tags occupy the top byte of the replica field so that streams used
/// for different jobs under one master seed never collide.
enum class StreamPurpose : std::uint64_t {
  kWalk = 0,
  kEscape = 1,
  kCrossA = 2,
  kCrossB = 3,
  kCrossAux = 4,
  kCentering = 5,
  kIntersectA = 6,
  kIntersectB = 7,
  kRandomSet = 8,
  kSynthetic = 9,
  kBootstrap = 10,
};

inline constexpr std::uint64_t stream_tag(StreamPurpose purpose, std::uint64_t index) noexcept {
  return (static_cast<std::uint64_t>(purpose) << 56) | (index & ((std::uint64_t{1} << 56) - 1));
}

class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit StreamRng(StreamId id);
  explicit StreamRng(std::uint64_t master, std::uint64_t replica = 0, std::uint64_t point = 0)
      : StreamRng(StreamId{master, replica, point}) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open01() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Marsaglia's polar method.
  double normal() noexcept;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace stablewalk
