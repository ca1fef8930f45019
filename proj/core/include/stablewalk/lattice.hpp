#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>

#include "stablewalk/error.hpp"

namespace stablewalk {

inline constexpr int kMaxDim = 8;

/// A site of Z^d stored inline; coordinates beyond `dim()` are kept at zero so
/// that equality and hashing can look at the whole array.
class LatticePoint {
 public:
  LatticePoint() = default;

  explicit LatticePoint(int dim) : dim_(static_cast<std::uint8_t>(dim)) {
    if (dim < 1 || dim > kMaxDim) {
      throw Error(ErrorCode::kInvalidParameter, "lattice dimension must be in [1, 8]");
    }
  }

  LatticePoint(std::initializer_list<std::int64_t> coords) : LatticePoint(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  explicit LatticePoint(std::span<const std::int64_t> coords) : LatticePoint(static_cast<int>(coords.size())) {
    std::copy(coords.begin(), coords.end(), c_.begin());
  }

  static LatticePoint origin(int dim) { return LatticePoint(dim); }

  static LatticePoint unit(int dim, int axis, std::int64_t scale = 1) {
    LatticePoint p(dim);
    p.c_[axis] = scale;
    return p;
  }

  int dim() const noexcept { return dim_; }
  std::int64_t operator[](int i) const noexcept { return c_[i]; }
  std::int64_t& operator[](int i) noexcept { return c_[i]; }
  std::span<const std::int64_t> coords() const noexcept { return {c_.data(), dim_}; }

  bool is_origin() const noexcept {
    return std::all_of(c_.begin(), c_.begin() + dim_, [](std::int64_t v) { return v == 0; });
  }

  std::int64_t chebyshev_norm() const noexcept {
    std::int64_t m = 0;
    for (int i = 0; i < dim_; ++i) m = std::max(m, c_[i] < 0 ? -c_[i] : c_[i]);
    return m;
  }

  LatticePoint operator-() const noexcept {
    LatticePoint r = *this;
    for (int i = 0; i < dim_; ++i) r.c_[i] = -c_[i];
    return r;
  }

  LatticePoint& operator+=(const LatticePoint& o) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  LatticePoint& operator-=(const LatticePoint& o) noexcept {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) noexcept { return a += b; }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) noexcept { return a -= b; }

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint& a, const LatticePoint& b) noexcept {
    if (a.dim_ != b.dim_) return a.dim_ <=> b.dim_;
    return a.c_ <=> b.c_;
  }

  /// Sorted absolute coordinates: the orbit representative under the
  /// hyperoctahedral group. Green values of the shipped laws depend only on it.
  LatticePoint canonical_abs() const noexcept {
    LatticePoint r = *this;
    for (int i = 0; i < dim_; ++i) r.c_[i] = c_[i] < 0 ? -c_[i] : c_[i];
    std::sort(r.c_.begin(), r.c_.begin() + dim_);
    return r;
  }

  std::string to_string() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ",";
      s += std::to_string(c_[i]);
    }
    return s + ")";
  }

 private:
  std::array<std::int64_t, kMaxDim> c_{};
  std::uint8_t dim_ = 0;
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(p.dim());
    for (int i = 0; i < p.dim(); ++i) {
      h ^= static_cast<std::uint64_t>(p[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace stablewalk
