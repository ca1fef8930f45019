#include "stablewalk/site_set.hpp"

#include <algorithm>
#include <bit>

#include "stablewalk/error.hpp"

namespace stablewalk {
namespace {

__extension__ typedef unsigned __int128 u128;

}  // namespace

SiteSet::SiteSet(int d, std::size_t expected) : d_(d) {
  if (d < 1 || d > kMaxDim) throw Error(ErrorCode::kInvalidParameter, "dimension must be in [1, 8]");
  bits_ = d <= 2 ? 64 : 128 / d;
  const std::size_t cap = std::bit_ceil(std::max<std::size_t>(16, 2 * expected));
  slots_.assign(cap, Slot{0, 0, kEmpty});
  mask_ = cap - 1;
}

bool SiteSet::packable(const LatticePoint& p) const noexcept {
  if (bits_ == 64) return true;
  const std::int64_t half = std::int64_t{1} << (bits_ - 1);
  for (int i = 0; i < d_; ++i) {
    if (p[i] < -half || p[i] >= half) return false;
  }
  return true;
}

bool SiteSet::pack(const LatticePoint& p, std::uint64_t& lo, std::uint64_t& hi) const noexcept {
  if (bits_ == 64) {
    lo = static_cast<std::uint64_t>(p[0]);
    hi = d_ == 2 ? static_cast<std::uint64_t>(p[1]) : 0;
    return true;
  }
  const std::int64_t half = std::int64_t{1} << (bits_ - 1);
  const u128 field_mask = (u128{1} << bits_) - 1;
  u128 key = 0;
  for (int i = 0; i < d_; ++i) {
    if (p[i] < -half || p[i] >= half) return false;
    key = (key << bits_) | (static_cast<u128>(static_cast<std::uint64_t>(p[i] + half)) & field_mask);
  }
  lo = static_cast<std::uint64_t>(key);
  hi = static_cast<std::uint64_t>(key >> 64);
  return true;
}

LatticePoint SiteSet::unpack(std::uint64_t lo, std::uint64_t hi) const {
  LatticePoint p(d_);
  if (bits_ == 64) {
    p[0] = static_cast<std::int64_t>(lo);
    if (d_ == 2) p[1] = static_cast<std::int64_t>(hi);
    return p;
  }
  const std::int64_t half = std::int64_t{1} << (bits_ - 1);
  const u128 field_mask = (u128{1} << bits_) - 1;
  u128 key = (static_cast<u128>(hi) << 64) | lo;
  for (int i = d_ - 1; i >= 0; --i) {
    p[i] = static_cast<std::int64_t>(static_cast<std::uint64_t>(key & field_mask)) - half;
    key >>= bits_;
  }
  return p;
}

bool SiteSet::insert(const LatticePoint& p, std::int64_t step) {
  std::uint64_t lo, hi;
  if (!pack(p, lo, hi)) {
    throw Error(ErrorCode::kPackingOverflow, "site " + p.to_string() + " exceeds the " + std::to_string(bits_) +
                                                 "-bit coordinate budget");
  }
  std::size_t i = mix(lo, hi) & mask_;
  while (slots_[i].step != kEmpty) {
    if (slots_[i].lo == lo && slots_[i].hi == hi) return false;
    i = (i + 1) & mask_;
  }
  slots_[i] = Slot{lo, hi, step};
  if (2 * ++size_ > slots_.size()) grow();
  return true;
}

std::int64_t SiteSet::first_visit(const LatticePoint& p) const noexcept {
  std::uint64_t lo, hi;
  if (!pack(p, lo, hi)) return kEmpty;
  std::size_t i = mix(lo, hi) & mask_;
  while (slots_[i].step != kEmpty) {
    if (slots_[i].lo == lo && slots_[i].hi == hi) return slots_[i].step;
    i = (i + 1) & mask_;
  }
  return kEmpty;
}

void SiteSet::grow() {
  std::vector<Slot> old = std::move(slots_);
  slots_.assign(old.size() * 2, Slot{0, 0, kEmpty});
  mask_ = slots_.size() - 1;
  for (const Slot& s : old) {
    if (s.step == kEmpty) continue;
    std::size_t i = mix(s.lo, s.hi) & mask_;
    while (slots_[i].step != kEmpty) i = (i + 1) & mask_;
    slots_[i] = s;
  }
}

void SiteSet::clear() noexcept {
  std::fill(slots_.begin(), slots_.end(), Slot{0, 0, kEmpty});
  size_ = 0;
}

std::vector<LatticePoint> SiteSet::sorted_sites() const {
  std::vector<LatticePoint> out;
  out.reserve(size_);
  for_each([&](const LatticePoint& p, std::int64_t) { out.push_back(p); });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace stablewalk
