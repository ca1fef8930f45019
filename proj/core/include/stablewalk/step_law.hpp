#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stablewalk/lattice.hpp"
#include "stablewalk/rng.hpp"
#include "stablewalk/special.hpp"

namespace stablewalk {

enum class LawFamily {
  kAxialPowerLaw,  // P(r e) ∝ r^{-1-alpha} over the 2d axis directions e, plus a loop atom
  kLazySimple,     // loop atom, remaining mass uniform on the 2d unit neighbours
  kFinite,         // explicit finite atom list (custom and test laws)
};

enum class TransienceClass { kNotImplied, kTransient, kStronglyTransient };

std::string to_string(LawFamily f);
LawFamily law_family_from_string(const std::string& s);
std::string to_string(TransienceClass c);

/// Radii up to this bound are drawn from the alias table; larger radii come from
/// exact inversion of the Hurwitz-zeta tail.
inline constexpr int kAliasRadius = 256;

/// A symmetric step distribution on Z^d. Immutable after construction and safe
/// to share between threads; sampling state lives in the caller's StreamRng.
class StepLaw {
 public:
  using Atom = std::pair<LatticePoint, double>;

  static StepLaw axial_power_law(int d, double alpha, double loop_prob);
  static StepLaw lazy_simple(int d, double loop_prob);
  /// Arbitrary finite law. Probabilities must be nonnegative and sum to 1; the law
  /// need not be symmetric (deterministic drift laws are useful in tests).
  static StepLaw finite(int d, std::vector<Atom> atoms);

  int dim() const noexcept { return d_; }
  double alpha() const noexcept { return alpha_; }
  double loop_prob() const noexcept { return loop_prob_; }
  LawFamily family() const noexcept { return family_; }
  /// zeta(1+alpha) for the axial family, 1 otherwise.
  double normalizer() const noexcept { return normalizer_; }

  /// True when each non-loop step moves along a single uniformly chosen axis with
  /// a symmetric one-dimensional jump law (both shipped families).
  bool is_axial() const noexcept { return family_ != LawFamily::kFinite; }
  bool is_symmetric() const;

  double probability(const LatticePoint& z) const;

  /// One-dimensional jump law along an axis: P(+-r) for r >= 1.
  double axis_jump_probability(std::int64_t r) const;
  /// sum_{|r| >= r0} P_axis(r), r0 >= 1.
  double axis_tail_mass(std::int64_t r0) const;
  /// 1 - psi(theta) of the axis jump law, |theta| <= pi.
  double axis_one_minus_psi(double theta) const;

  /// Atoms with Chebyshev norm <= radius, and the mass left outside.
  std::vector<Atom> support_within(std::int64_t radius) const;
  double mass_outside(std::int64_t radius) const;

  /// Draws one step and adds it to `pos` in place (the walk hot path).
  void step(LatticePoint& pos, StreamRng& rng) const;
  LatticePoint sample(StreamRng& rng) const {
    LatticePoint z(d_);
    step(z, rng);
    return z;
  }

  /// Stable digest of the law parameters, hex encoded.
  std::string fingerprint() const;

 private:
  struct Outcome {
    std::int8_t axis;   // -1 loop, -2 general finite atom
    bool tail;          // radius drawn from the tail beyond kAliasRadius
    std::int64_t delta; // signed jump along `axis`, or atom index for finite laws
  };

  StepLaw() = default;
  void build_alias(const std::vector<double>& weights);
  std::int64_t sample_tail_radius(StreamRng& rng) const;

  int d_ = 1;
  double alpha_ = 2.0;
  double loop_prob_ = 0.0;
  LawFamily family_ = LawFamily::kLazySimple;
  double normalizer_ = 1.0;
  double tail_above_alias_ = 0.0;  // hurwitz_zeta(1+alpha, kAliasRadius + 1)
  std::shared_ptr<const PowerLawCharacteristic> characteristic_;
  std::vector<Atom> atoms_;
  std::vector<Outcome> outcomes_;
  std::vector<double> alias_prob_;
  std::vector<std::uint32_t> alias_index_;
};

/// Validating constructor mirroring the run-config law block.
StepLaw build_step_law(int d, double alpha, double loop_prob, LawFamily family);

/// Aperiodicity: the support within `radius` generates Z^d as an additive group.
/// Decided by integer row reduction (Hermite normal form) of the support vectors.
bool check_aperiodicity(const StepLaw& law, std::int64_t radius = 4);

/// Same test on an explicit generator list.
bool generates_full_lattice(int d, const std::vector<LatticePoint>& generators);

TransienceClass transience_class(int d, double alpha);

}  // namespace stablewalk
