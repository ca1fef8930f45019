#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stablewalk/lattice.hpp"

namespace stablewalk {

/// Open-addressing map from visited sites to their first-visit step.
///
/// Sites are packed into a 128-bit key with 128/d bits per signed coordinate
/// (64 for d <= 2, 42 for d = 3, 21 for d = 6). Linear probing, power-of-two
/// table, load factor at most 1/2. Inserting a site whose coordinates do not fit
/// the budget throws packing-overflow; lookups of such sites report "absent",
/// which is correct because they can never have been inserted.
class SiteSet {
 public:
  static constexpr std::int64_t kEmpty = -1;

  explicit SiteSet(int d, std::size_t expected = 16);

  int dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  /// Inserts `p` with first-visit step `step` if absent. Returns true when new.
  bool insert(const LatticePoint& p, std::int64_t step);

  /// First-visit step of `p`, or kEmpty when absent.
  std::int64_t first_visit(const LatticePoint& p) const noexcept;
  bool contains(const LatticePoint& p) const noexcept { return first_visit(p) != kEmpty; }

  void clear() noexcept;

  /// True when every coordinate of `p` fits the per-coordinate bit budget.
  bool packable(const LatticePoint& p) const noexcept;

  /// Visits every (site, first-visit step) in table order.
  template <class F>
  void for_each(F&& f) const {
    for (const Slot& s : slots_) {
      if (s.step != kEmpty) f(unpack(s.lo, s.hi), s.step);
    }
  }

  /// Sites sorted lexicographically (deterministic order for output).
  std::vector<LatticePoint> sorted_sites() const;

 private:
  struct Slot {
    std::uint64_t lo;
    std::uint64_t hi;
    std::int64_t step;
  };

  bool pack(const LatticePoint& p, std::uint64_t& lo, std::uint64_t& hi) const noexcept;
  LatticePoint unpack(std::uint64_t lo, std::uint64_t hi) const;
  static std::uint64_t mix(std::uint64_t lo, std::uint64_t hi) noexcept {
    std::uint64_t h = lo ^ (hi * 0x9e3779b97f4a7c15ULL);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ULL;
    h ^= h >> 33;
    return h;
  }
  void grow();

  int d_;
  int bits_;  // per coordinate
  std::size_t size_ = 0;
  std::size_t mask_ = 0;
  std::vector<Slot> slots_;
};

}  // namespace stablewalk
