#include "stablewalk/step_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "stablewalk/error.hpp"

namespace stablewalk {
namespace {

constexpr std::int64_t kCoordinateClamp = std::int64_t{1} << 62;

std::int64_t saturating_add(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) return b > 0 ? kCoordinateClamp : -kCoordinateClamp;
  return std::clamp(r, -kCoordinateClamp, kCoordinateClamp);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(LawFamily f) {
  switch (f) {
    case LawFamily::kAxialPowerLaw: return "axial-power-law";
    case LawFamily::kLazySimple: return "lazy-simple";
    case LawFamily::kFinite: return "finite";
  }
  return "unknown";
}

LawFamily law_family_from_string(const std::string& s) {
  if (s == "axial-power-law") return LawFamily::kAxialPowerLaw;
  if (s == "lazy-simple") return LawFamily::kLazySimple;
  if (s == "finite") return LawFamily::kFinite;
  throw Error(ErrorCode::kInvalidParameter, "unknown law family '" + s + "'");
}

std::string to_string(TransienceClass c) {
  switch (c) {
    case TransienceClass::kNotImplied: return "not-implied";
    case TransienceClass::kTransient: return "transient";
    case TransienceClass::kStronglyTransient: return "strongly-transient";
  }
  return "unknown";
}

StepLaw StepLaw::axial_power_law(int d, double alpha, double loop_prob) {
  if (d < 1 || d > kMaxDim) throw Error(ErrorCode::kInvalidParameter, "dimension must be in [1, 8]");
  if (!(alpha > 0.0) || alpha > 2.0) throw Error(ErrorCode::kInvalidParameter, "alpha must lie in (0, 2]");
  if (!(loop_prob >= 0.0) || !(loop_prob < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "loop_prob must lie in [0, 1)");
  }
  StepLaw law;
  law.d_ = d;
  law.alpha_ = alpha;
  law.loop_prob_ = loop_prob;
  law.family_ = LawFamily::kAxialPowerLaw;
  const double s = 1.0 + alpha;
  law.normalizer_ = riemann_zeta(s);
  law.tail_above_alias_ = hurwitz_zeta(s, kAliasRadius + 1.0);
  law.characteristic_ = std::make_shared<PowerLawCharacteristic>(alpha);

  std::vector<double> weights;
  if (loop_prob > 0.0) {
    law.outcomes_.push_back({-1, false, 0});
    weights.push_back(loop_prob);
  }
  const double per_direction = (1.0 - loop_prob) / (2.0 * d * law.normalizer_);
  for (int axis = 0; axis < d; ++axis) {
    for (int sign : {1, -1}) {
      for (std::int64_t r = 1; r <= kAliasRadius; ++r) {
        law.outcomes_.push_back({static_cast<std::int8_t>(axis), false, sign * r});
        weights.push_back(per_direction * std::pow(static_cast<double>(r), -s));
      }
      law.outcomes_.push_back({static_cast<std::int8_t>(axis), true, sign});
      weights.push_back(per_direction * law.tail_above_alias_);
    }
  }
  law.build_alias(weights);
  return law;
}

StepLaw StepLaw::lazy_simple(int d, double loop_prob) {
  if (d < 1 || d > kMaxDim) throw Error(ErrorCode::kInvalidParameter, "dimension must be in [1, 8]");
  if (!(loop_prob >= 0.0) || !(loop_prob < 1.0)) {
    throw Error(ErrorCode::kInvalidParameter, "loop_prob must lie in [0, 1)");
  }
  StepLaw law;
  law.d_ = d;
  law.alpha_ = 2.0;
  law.loop_prob_ = loop_prob;
  law.family_ = LawFamily::kLazySimple;
  std::vector<double> weights;
  if (loop_prob > 0.0) {
    law.outcomes_.push_back({-1, false, 0});
    weights.push_back(loop_prob);
  }
  for (int axis = 0; axis < d; ++axis) {
    for (int sign : {1, -1}) {
      law.outcomes_.push_back({static_cast<std::int8_t>(axis), false, sign});
      weights.push_back((1.0 - loop_prob) / (2.0 * d));
    }
  }
  law.build_alias(weights);
  return law;
}

StepLaw StepLaw::finite(int d, std::vector<Atom> atoms) {
  if (d < 1 || d > kMaxDim) throw Error(ErrorCode::kInvalidParameter, "dimension must be in [1, 8]");
  if (atoms.empty()) throw Error(ErrorCode::kInvalidParameter, "finite law needs at least one atom");
  double total = 0.0;
  for (const auto& [z, p] : atoms) {
    if (z.dim() != d) throw Error(ErrorCode::kDimensionMismatch, "atom dimension differs from law dimension");
    if (!(p >= 0.0)) throw Error(ErrorCode::kInvalidParameter, "negative atom probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::kInvalidParameter, "atom probabilities must sum to 1");
  StepLaw law;
  law.d_ = d;
  law.alpha_ = 2.0;
  law.family_ = LawFamily::kFinite;
  std::vector<double> weights;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].second <= 0.0) continue;
    if (atoms[i].first.is_origin()) law.loop_prob_ += atoms[i].second;
    law.outcomes_.push_back({-2, false, static_cast<std::int64_t>(law.atoms_.size())});
    law.atoms_.push_back(atoms[i]);
    weights.push_back(atoms[i].second);
  }
  law.build_alias(weights);
  return law;
}

void StepLaw::build_alias(const std::vector<double>& weights) {
  // Vose's alias method.
  const std::size_t n = weights.size();
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;
  alias_prob_.assign(n, 1.0);
  alias_index_.resize(n);
  std::iota(alias_index_.begin(), alias_index_.end(), 0u);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    alias_prob_[s] = scaled[s];
    alias_index_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
}

std::int64_t StepLaw::sample_tail_radius(StreamRng& rng) const {
  const double s = 1.0 + alpha_;
  const double target = rng.uniform_open01() * tail_above_alias_;
  // Continuous approximation zeta(s, r) ~ (r - 1/2)^{1-s} / (s - 1), then exact correction.
  const double guess = 0.5 + std::pow(target * (s - 1.0), -1.0 / (s - 1.0));
  if (guess > 0x1.0p44) {
    return guess >= static_cast<double>(kCoordinateClamp) ? kCoordinateClamp : static_cast<std::int64_t>(guess);
  }
  auto r = std::max<std::int64_t>(kAliasRadius + 1, static_cast<std::int64_t>(guess));
  while (r > kAliasRadius + 1 && hurwitz_zeta(s, static_cast<double>(r)) < target) --r;
  while (hurwitz_zeta(s, static_cast<double>(r + 1)) >= target) ++r;
  return r;
}

void StepLaw::step(LatticePoint& pos, StreamRng& rng) const {
  auto j = static_cast<std::size_t>(rng.below(outcomes_.size()));
  if (rng.uniform01() >= alias_prob_[j]) j = alias_index_[j];
  const Outcome& o = outcomes_[j];
  if (o.axis >= 0) {
    std::int64_t delta = o.delta;
    if (o.tail) {
      const std::int64_t r = sample_tail_radius(rng);
      delta = o.delta > 0 ? r : -r;
    }
    pos[o.axis] = saturating_add(pos[o.axis], delta);
  } else if (o.axis == -2) {
    const LatticePoint& z = atoms_[static_cast<std::size_t>(o.delta)].first;
    for (int i = 0; i < d_; ++i) pos[i] = saturating_add(pos[i], z[i]);
  }
}

bool StepLaw::is_symmetric() const {
  if (family_ != LawFamily::kFinite) return true;
  for (const auto& [z, p] : atoms_) {
    if (std::abs(probability(-z) - p) > 1e-15) return false;
  }
  return true;
}

double StepLaw::probability(const LatticePoint& z) const {
  if (z.dim() != d_) throw Error(ErrorCode::kDimensionMismatch, "point dimension differs from law dimension");
  if (family_ == LawFamily::kFinite) {
    double p = 0.0;
    for (const auto& [a, w] : atoms_) {
      if (a == z) p += w;
    }
    return p;
  }
  if (z.is_origin()) return loop_prob_;
  int axis = -1;
  for (int i = 0; i < d_; ++i) {
    if (z[i] != 0) {
      if (axis >= 0) return 0.0;
      axis = i;
    }
  }
  return (1.0 - loop_prob_) / d_ * axis_jump_probability(z[axis]);
}

double StepLaw::axis_jump_probability(std::int64_t r) const {
  r = r < 0 ? -r : r;
  if (r == 0) return 0.0;
  switch (family_) {
    case LawFamily::kAxialPowerLaw:
      return std::pow(static_cast<double>(r), -1.0 - alpha_) / (2.0 * normalizer_);
    case LawFamily::kLazySimple:
      return r == 1 ? 0.5 : 0.0;
    case LawFamily::kFinite:
      break;
  }
  throw Error(ErrorCode::kUnsupportedLaw, "finite laws have no axis decomposition");
}

double StepLaw::axis_tail_mass(std::int64_t r0) const {
  if (r0 <= 1) return 1.0;
  switch (family_) {
    case LawFamily::kAxialPowerLaw:
      return hurwitz_zeta(1.0 + alpha_, static_cast<double>(r0)) / normalizer_;
    case LawFamily::kLazySimple:
      return 0.0;
    case LawFamily::kFinite:
      break;
  }
  throw Error(ErrorCode::kUnsupportedLaw, "finite laws have no axis decomposition");
}

double StepLaw::axis_one_minus_psi(double theta) const {
  switch (family_) {
    case LawFamily::kAxialPowerLaw:
      return characteristic_->one_minus_psi(theta);
    case LawFamily::kLazySimple: {
      const double h = std::sin(theta / 2.0);
      return 2.0 * h * h;
    }
    case LawFamily::kFinite:
      break;
  }
  throw Error(ErrorCode::kUnsupportedLaw, "finite laws have no axis decomposition");
}

std::vector<StepLaw::Atom> StepLaw::support_within(std::int64_t radius) const {
  std::vector<Atom> out;
  if (family_ == LawFamily::kFinite) {
    for (const auto& a : atoms_) {
      if (a.first.chebyshev_norm() <= radius) out.push_back(a);
    }
    return out;
  }
  if (loop_prob_ > 0.0) out.emplace_back(LatticePoint::origin(d_), loop_prob_);
  const std::int64_t rmax = family_ == LawFamily::kLazySimple ? std::min<std::int64_t>(radius, 1) : radius;
  for (int axis = 0; axis < d_; ++axis) {
    for (std::int64_t r = 1; r <= rmax; ++r) {
      for (std::int64_t sign : {1, -1}) {
        const auto z = LatticePoint::unit(d_, axis, sign * r);
        out.emplace_back(z, probability(z));
      }
    }
  }
  return out;
}

double StepLaw::mass_outside(std::int64_t radius) const {
  if (family_ == LawFamily::kFinite) {
    double m = 0.0;
    for (const auto& [z, p] : atoms_) {
      if (z.chebyshev_norm() > radius) m += p;
    }
    return m;
  }
  return (1.0 - loop_prob_) * axis_tail_mass(radius + 1);
}

std::string StepLaw::fingerprint() const {
  std::string canon = to_string(family_) + "|" + std::to_string(d_) + "|" + format_double(alpha_) + "|" +
                      format_double(loop_prob_);
  for (const auto& [z, p] : atoms_) canon += "|" + z.to_string() + ":" + format_double(p);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return buf;
}

StepLaw build_step_law(int d, double alpha, double loop_prob, LawFamily family) {
  switch (family) {
    case LawFamily::kAxialPowerLaw:
      return StepLaw::axial_power_law(d, alpha, loop_prob);
    case LawFamily::kLazySimple:
      if (alpha != 2.0) throw Error(ErrorCode::kFamilyMismatch, "lazy-simple requires alpha = 2");
      return StepLaw::lazy_simple(d, loop_prob);
    case LawFamily::kFinite:
      break;
  }
  throw Error(ErrorCode::kInvalidParameter, "finite laws are built from an explicit atom list");
}

bool generates_full_lattice(int d, const std::vector<LatticePoint>& generators) {
  std::vector<std::vector<__int128>> rows;
  for (const auto& g : generators) {
    if (g.dim() != d) throw Error(ErrorCode::kDimensionMismatch, "generator dimension differs");
    if (g.is_origin()) continue;
    rows.emplace_back(g.coords().begin(), g.coords().end());
  }
  std::size_t pivot_row = 0;
  for (int col = 0; col < d; ++col) {
    // Euclid on the column: keep the smallest nonzero entry as pivot, reduce the rest.
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t r = pivot_row; r < rows.size(); ++r) {
        if (rows[r][col] == 0) continue;
        if (best == rows.size() || (rows[r][col] < 0 ? -rows[r][col] : rows[r][col]) <
                                       (rows[best][col] < 0 ? -rows[best][col] : rows[best][col])) {
          best = r;
        }
      }
      if (best == rows.size()) return false;  // rank deficient
      std::swap(rows[pivot_row], rows[best]);
      bool done = true;
      for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
        if (rows[r][col] == 0) continue;
        const __int128 q = rows[r][col] / rows[pivot_row][col];
        for (int c = 0; c < d; ++c) rows[r][c] -= q * rows[pivot_row][c];
        if (rows[r][col] != 0) done = false;
      }
      if (done) break;
    }
    const __int128 p = rows[pivot_row][col];
    if (p != 1 && p != -1) return false;
    ++pivot_row;
  }
  return true;
}

bool check_aperiodicity(const StepLaw& law, std::int64_t radius) {
  std::vector<LatticePoint> gens;
  for (const auto& [z, p] : law.support_within(radius)) {
    if (p > 0.0) gens.push_back(z);
  }
  return generates_full_lattice(law.dim(), gens);
}

TransienceClass transience_class(int d, double alpha) {
  if (!(alpha > 0.0) || alpha > 2.0) throw Error(ErrorCode::kInvalidParameter, "alpha must lie in (0, 2]");
  if (d > 2.0 * alpha) return TransienceClass::kStronglyTransient;
  if (d > alpha) return TransienceClass::kTransient;
  return TransienceClass::kNotImplied;
}

}  // namespace stablewalk
