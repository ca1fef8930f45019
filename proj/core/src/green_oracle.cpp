#include <fftw3.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <limits>
#include <unordered_map>

#include "stablewalk/error.hpp"
#include "stablewalk/green.hpp"
#include "stablewalk/special.hpp"

namespace stablewalk {
namespace {

// Lower and upper bounds for the one-dimensional convolution powers a_l(m),
// l = 0..horizon, m = 0..radius, stored row-major by l.
struct AxisPowers {
  std::size_t stride = 0;
  std::vector<double> lo, hi;
  double max_alias = 0.0;
  double at_lo(std::size_t l, std::size_t m) const { return lo[l * stride + m]; }
  double at_hi(std::size_t l, std::size_t m) const { return hi[l * stride + m]; }
};

AxisPowers simple_powers(std::int64_t radius, std::int64_t horizon) {
  AxisPowers ap;
  ap.stride = static_cast<std::size_t>(radius) + 1;
  ap.lo.assign(ap.stride * (horizon + 1), 0.0);
  ap.hi = ap.lo;
  for (std::int64_t l = 0; l <= horizon; ++l) {
    for (std::int64_t m = 0; m <= std::min(radius, l); ++m) {
      if ((l + m) % 2) continue;
      // C(l, (l+m)/2) / 2^l
      const double v = std::exp(std::lgamma(l + 1.0) - std::lgamma((l + m) / 2 + 1.0) - std::lgamma((l - m) / 2 + 1.0) -
                                l * std::log(2.0));
      ap.lo[l * ap.stride + m] = v * (1.0 - 1e-12);
      ap.hi[l * ap.stride + m] = v * (1.0 + 1e-12);
    }
  }
  return ap;
}

// Exact powers on the torus Z/NZ through a real even transform, with the
// wrap-around bounded by P(Y_1 + ... + Y_l = w) <= l * mu(ceil(|w| / l)).
AxisPowers power_law_powers(const StepLaw& law, std::int64_t radius, std::int64_t horizon, int period_log2) {
  const double s = 1.0 + law.alpha();
  const double zeta_s = law.normalizer();
  const std::int64_t n_period = std::int64_t{1} << period_log2;
  const std::int64_t half = n_period / 2;
  if (radius >= half / 4) throw Error(ErrorCode::kBoxTooSmall, "period too small for the requested radius");
  const auto len = static_cast<std::size_t>(half + 1);
  const double nd = static_cast<double>(n_period);

  double* buf = fftw_alloc_real(len);
  double* lam = fftw_alloc_real(len);
  double* pw = fftw_alloc_real(len);
  fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(len), pw, buf, FFTW_REDFT00, FFTW_ESTIMATE);

  // Wrapped law mu_N(j), j = 0..N/2.
  pw[0] = std::pow(nd, -s);
  const double ns = std::pow(nd, -s) / (2.0 * zeta_s);
  for (std::int64_t j = 1; j <= half; ++j) {
    const double u = static_cast<double>(j) / nd;
    pw[j] = ns * (hurwitz_zeta(s, u) + hurwitz_zeta(s, 1.0 - u));
  }
  fftw_execute(plan);  // buf = eigenvalues lambda_k, k = 0..N/2
  std::copy(buf, buf + len, lam);
  std::fill(pw, pw + len, 1.0);

  AxisPowers ap;
  ap.stride = static_cast<std::size_t>(radius) + 1;
  ap.lo.assign(ap.stride * (horizon + 1), 0.0);
  ap.hi = ap.lo;
  ap.lo[0] = ap.hi[0] = 1.0;
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * period_log2;
  auto mu = [&](double r) { return std::pow(r, -s) / (2.0 * zeta_s); };
  for (std::int64_t l = 1; l <= horizon; ++l) {
    for (std::size_t k = 0; k < len; ++k) pw[k] *= lam[k];
    fftw_execute(plan);
    const double dl = static_cast<double>(l);
    for (std::int64_t m = 0; m <= radius; ++m) {
      const double wrapped = buf[m] / nd;
      double alias = 0.0;
      constexpr int kTerms = 64;
      for (int q = 1; q <= kTerms; ++q) {
        for (double w : {static_cast<double>(q * n_period + m), static_cast<double>(q * n_period - m)}) {
          alias += dl * mu(std::ceil(w / dl));
        }
      }
      // Remaining q > kTerms: integral bound of 2 l mu((q N - m) / l) dq.
      const double w0 = static_cast<double>(kTerms * n_period - radius);
      alias += 2.0 * dl * std::pow(dl, s) / (2.0 * zeta_s) * std::pow(w0, 1.0 - s) / ((s - 1.0) * nd);
      alias = std::min(alias, std::max(wrapped, 0.0));
      ap.max_alias = std::max(ap.max_alias, alias);
      ap.hi[l * ap.stride + m] = std::max(0.0, wrapped) + rounding;
      ap.lo[l * ap.stride + m] = std::max(0.0, wrapped - alias - rounding);
    }
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
  fftw_free(lam);
  fftw_free(pw);
  return ap;
}

}  // namespace

double analytic_return_tail(const StepLaw& law, std::int64_t horizon) {
  const int d = law.dim();
  const double alpha = law.alpha();
  const double da = d / alpha;
  const double p0 = law.loop_prob();
  double psi_min = 1.0;
  for (int i = 0; i <= 4096; ++i) psi_min = std::min(psi_min, 1.0 - law.axis_one_minus_psi(std::numbers::pi * i / 4096.0));
  const double phi_min = p0 + (1.0 - p0) * psi_min;
  if (phi_min <= -1.0 + 1e-12) return std::numeric_limits<double>::infinity();
  const double a = boost::math::tgamma(1.0 + 1.0 / alpha) / std::numbers::pi;
  const double rate = (1.0 - p0) * psi_lower_constant(law) / d;
  const double h = static_cast<double>(std::max<std::int64_t>(horizon, 1));
  const double q = std::max(0.0, -phi_min * 1.01);
  return std::pow(a, d) * std::pow(rate, -da) * std::pow(h, 1.0 - da) / (da - 1.0) +
         std::pow(q, h + 1.0) / (1.0 - q);
}

GreenTable convolution_green_oracle(const StepLaw& law, std::int64_t box_radius, std::int64_t horizon,
                                    OracleOptions opts) {
  if (box_radius < 1) throw Error(ErrorCode::kInvalidParameter, "box_radius must be >= 1");
  if (horizon < 0) throw Error(ErrorCode::kInvalidParameter, "horizon must be >= 0");
  if (!law.is_axial()) throw Error(ErrorCode::kUnsupportedLaw, "oracle needs an axial law");
  const int d = law.dim();
  const auto h = static_cast<std::size_t>(horizon);

  const std::vector<LatticePoint> points = canonical_points(d, box_radius);
  if (static_cast<double>(points.size()) * static_cast<double>(h + 1) > 4e8) {
    throw Error(ErrorCode::kInvalidParameter, "oracle table too large for memory");
  }

  const AxisPowers ap = law.family() == LawFamily::kLazySimple
                            ? simple_powers(box_radius, horizon)
                            : power_law_powers(law, box_radius, horizon, opts.period_log2);

  // Level-by-level multinomial recombination over canonical tuples. Level j
  // holds Q^{(j)}_k(t_1..t_j) = P(k axial moves over j axes land on t), for the
  // sorted prefixes of the final tuples; the prefix of a sorted tuple drops its
  // largest entry, so it is again sorted.
  const std::uint64_t base = static_cast<std::uint64_t>(box_radius) + 1;
  auto code = [&](const LatticePoint& p, int len) {
    std::uint64_t c = 0;
    for (int i = 0; i < len; ++i) c = c * base + static_cast<std::uint64_t>(p[i]);
    return c;
  };
  std::vector<std::vector<LatticePoint>> level_points(d + 1);
  {
    std::vector<std::unordered_map<std::uint64_t, int>> seen(d + 1);
    for (const auto& p : points) {
      for (int j = 1; j <= d; ++j) {
        const std::uint64_t c = code(p, j);
        if (seen[j].emplace(c, 0).second) level_points[j].push_back(p);
      }
    }
  }
  std::unordered_map<std::uint64_t, std::size_t> prev_index;
  std::vector<double> prev_lo, prev_hi;  // [tuple][k]
  for (std::size_t i = 0; i < level_points[1].size(); ++i) {
    const auto m = static_cast<std::size_t>(level_points[1][i][0]);
    prev_index[code(level_points[1][i], 1)] = i;
    for (std::size_t k = 0; k <= h; ++k) {
      prev_lo.push_back(ap.at_lo(k, m));
      prev_hi.push_back(ap.at_hi(k, m));
    }
  }
  for (int j = 2; j <= d; ++j) {
    const auto rows = binomial_rows(horizon, 1.0 / j);
    const auto& pts = level_points[j];
    std::vector<double> cur_lo(pts.size() * (h + 1)), cur_hi(pts.size() * (h + 1));
    std::unordered_map<std::uint64_t, std::size_t> cur_index;
    for (std::size_t ti = 0; ti < pts.size(); ++ti) {
      cur_index[code(pts[ti], j)] = ti;
      const std::size_t pi = prev_index.at(code(pts[ti], j - 1));
      const auto m = static_cast<std::size_t>(pts[ti][j - 1]);
      const double* plo = &prev_lo[pi * (h + 1)];
      const double* phi = &prev_hi[pi * (h + 1)];
      for (std::size_t k = 0; k <= h; ++k) {
        double lo = 0.0, hi = 0.0;
        const auto& row = rows[k];
        for (std::size_t l = 0; l <= k; ++l) {
          const double w = row[l];
          lo += w * plo[k - l] * ap.at_lo(l, m);
          hi += w * phi[k - l] * ap.at_hi(l, m);
        }
        cur_lo[ti * (h + 1) + k] = lo;
        cur_hi[ti * (h + 1) + k] = hi;
      }
    }
    prev_lo.swap(cur_lo);
    prev_hi.swap(cur_hi);
    prev_index.swap(cur_index);
  }

  // Binomial thinning by the loop atom: n steps contain k axial moves with
  // probability C(n,k) (1-p0)^k p0^{n-k}.
  const auto brow = binomial_rows(horizon, 1.0 - law.loop_prob());
  std::vector<double> weight(h + 1, 0.0);
  for (std::size_t n = 0; n <= h; ++n) {
    for (std::size_t k = 0; k <= n; ++k) weight[k] += brow[n][k];
  }

  // Return probabilities p_n(0), lower and upper.
  const std::size_t zi = prev_index.at(0);
  std::vector<double> ret_lo(h + 1, 0.0), ret_hi(h + 1, 0.0);
  for (std::size_t n = 0; n <= h; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      ret_lo[n] += brow[n][k] * prev_lo[zi * (h + 1) + k];
      ret_hi[n] += brow[n][k] * prev_hi[zi * (h + 1) + k];
    }
  }

  // Tail beyond the horizon: P(S_n = x) <= p_{2 floor(n/2)}(0), and the even
  // return probabilities are extrapolated with the smaller of the local and
  // the octave decay exponents.
  double tail = 0.0;
  if (horizon >= 8) {
    const std::int64_t e = horizon - horizon % 2;
    const std::int64_t e_half = (e / 2) - (e / 2) % 2;
    const double pe = ret_hi[e];
    const double beta_local = std::log(ret_hi[e - 2] / pe) / std::log(static_cast<double>(e) / (e - 2));
    const double beta_wide = std::log(ret_hi[e_half] / pe) / std::log(static_cast<double>(e) / e_half);
    const double beta = std::min(beta_local, beta_wide);
    if (!(beta > 1.0) || !std::isfinite(beta)) {
      throw Error(ErrorCode::kBoxTooSmall, "return probabilities do not decay fast enough by the horizon");
    }
    tail = (horizon == e ? pe : 0.0) + pe * static_cast<double>(e) / (beta - 1.0);
  } else {
    tail = std::numeric_limits<double>::infinity();  // too few terms to extrapolate
  }
  // Analytic companion: |phi|^n <= exp(-n (1-p0)/d sum_i (1 - psi(t_i))) + |phi_min|^n
  // with 1 - psi(t) >= c t^alpha, summed over n > horizon. The larger of the two
  // tails is used.
  if (std::isfinite(tail)) tail = std::max(tail, analytic_return_tail(law, horizon));

  GreenTable table(d, law.fingerprint(), box_radius, GreenMethod::kConvolutionOracle);
  double worst_alias = 0.0;
  for (std::size_t ti = 0; ti < level_points[d].size(); ++ti) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k <= h; ++k) {
      lo += weight[k] * prev_lo[ti * (h + 1) + k];
      hi += weight[k] * prev_hi[ti * (h + 1) + k];
    }
    worst_alias = std::max(worst_alias, hi - lo);
    GreenValue v;
    v.value = lo;
    v.error = (hi - lo) + tail;
    table.set(level_points[d][ti], v);
  }
  if (worst_alias > opts.max_alias_error) {
    throw Error(ErrorCode::kBoxTooSmall, "wrap-around error " + std::to_string(worst_alias) + " above limit");
  }
  table.return_probabilities = ret_lo;
  return table;
}

}  // namespace stablewalk
