#include "stablewalk/green.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <tuple>

#include "stablewalk/error.hpp"
#include "stablewalk/parallel.hpp"

namespace stablewalk {
namespace {

// Gauss-Kronrod 7/15 abscissae on [-1, 1] (nonnegative half) and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the abscissae kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Appends the 15 nodes of [a, b] with Kronrod and Gauss weights (0 where the
// node is not a Gauss node).
void append_panel(double a, double b, std::vector<double>& x, std::vector<double>& wk, std::vector<double>& wg) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  for (int i = 0; i < 7; ++i) {
    const double gw = (i % 2 == 1) ? kWg[i / 2] * h : 0.0;
    for (double sign : {-1.0, 1.0}) {
      x.push_back(c + sign * h * kXgk[i]);
      wk.push_back(h * kWgk[i]);
      wg.push_back(gw);
    }
  }
  x.push_back(c);
  wk.push_back(h * kWgk[7]);
  wg.push_back(h * kWg[3]);
}

}  // namespace

double psi_lower_constant(const StepLaw& law) {
  if (law.family() == LawFamily::kLazySimple) return 2.0 / (std::numbers::pi * std::numbers::pi);
  const double alpha = law.alpha();
  double c = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 4096; ++i) {
    const double t = std::numbers::pi * i / 4096.0;
    c = std::min(c, law.axis_one_minus_psi(t) / std::pow(t, alpha));
  }
  for (double t = std::numbers::pi / 4096.0; t > 1e-12; t *= 0.5) {
    c = std::min(c, law.axis_one_minus_psi(t) / std::pow(t, alpha));
  }
  return 0.98 * c;
}

QuadratureGreen::QuadratureGreen(const StepLaw& law, std::int64_t max_radius, QuadratureOptions opts)
    : d_(law.dim()),
      alpha_(law.alpha()),
      loop_prob_(law.loop_prob()),
      radius_(max_radius),
      tol_(opts.tol),
      fingerprint_(law.fingerprint()),
      law_(&law) {
  if (!law.is_axial()) throw Error(ErrorCode::kUnsupportedLaw, "quadrature needs an axial law");
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::kInvalidParameter, "tol must be positive");
  if (max_radius < 0) throw Error(ErrorCode::kInvalidParameter, "radius must be >= 0");
  if (transience_class(d_, alpha_) == TransienceClass::kNotImplied) {
    throw Error(ErrorCode::kNonTransientLaw, "d <= alpha: the Green function diverges");
  }

  c_lower_ = stablewalk::psi_lower_constant(law);

  for (int r = 0;; ++r) {
    build(r);
    double worst = 0.0;
    std::vector<LatticePoint> probes{LatticePoint::origin(d_)};
    if (radius_ > 0) {
      probes.push_back(LatticePoint::unit(d_, d_ - 1, radius_));
      LatticePoint diag(d_);
      for (int i = 0; i < d_; ++i) diag[i] = radius_;
      probes.push_back(diag);
      probes.push_back(LatticePoint::unit(d_, d_ - 1, std::max<std::int64_t>(1, radius_ / 2)));
    }
    for (const auto& p : probes) worst = std::max(worst, compute(p).error);
    if (worst <= tol_) break;
    if (r >= opts.max_refinements) {
      throw Error(ErrorCode::kToleranceUnreachable,
                  "quadrature error " + std::to_string(worst) + " above tol after refinement budget");
    }
  }
}

void QuadratureGreen::build(int refinement) {
  const double pi = std::numbers::pi;
  const double da = static_cast<double>(d_) / alpha_;
  const double pref = d_ / (1.0 - loop_prob_);

  // Outer cutoff S from the analytic tail bound.
  const double a_const = boost::math::tgamma(1.0 + 1.0 / alpha_) / pi * std::pow(c_lower_, -1.0 / alpha_);
  auto tail_at = [&](double s) { return pref * std::pow(a_const, d_) * std::pow(s, 1.0 - da) / (da - 1.0); };
  int k_max = 1;
  while (tail_at(std::ldexp(1.0, k_max)) > tol_ / 4.0) {
    if (++k_max > 60) throw Error(ErrorCode::kToleranceUnreachable, "s-tail too heavy for the requested tol");
  }
  s_max_ = std::ldexp(1.0, k_max);
  tail_bound_ = tail_at(s_max_);

  // Inner floor: [0, theta_min] is dropped, each kernel changes by <= theta_min / pi.
  double theta_min = pi;
  int shells = 0;
  while (pref * s_max_ * d_ * theta_min / pi > tol_ / 64.0) {
    theta_min *= 0.5;
    ++shells;
  }
  theta_floor_error_ = pref * s_max_ * d_ * theta_min / pi;

  theta_nodes_.clear();
  theta_wk_.clear();
  theta_wg_.clear();
  const double max_width = std::min(0.5, 2.0 / static_cast<double>(radius_ + 1));
  for (int j = 0; j < shells; ++j) {
    const double hi = pi * std::ldexp(1.0, -j);
    const double lo = 0.5 * hi;
    const int panels = static_cast<int>(std::ceil((hi - lo) / max_width)) << refinement;
    for (int p = 0; p < panels; ++p) {
      append_panel(lo + (hi - lo) * p / panels, lo + (hi - lo) * (p + 1) / panels, theta_nodes_, theta_wk_,
                   theta_wg_);
    }
  }
  one_minus_psi_.resize(theta_nodes_.size());
  for (std::size_t q = 0; q < theta_nodes_.size(); ++q) one_minus_psi_[q] = law_->axis_one_minus_psi(theta_nodes_[q]);

  s_nodes_.clear();
  s_wk_.clear();
  s_wg_.clear();
  std::vector<std::pair<double, double>> s_panels{{0.0, 0.5}, {0.5, 1.0}};
  for (int k = 0; k < k_max; ++k) s_panels.emplace_back(std::ldexp(1.0, k), std::ldexp(1.0, k + 1));
  const int sub = 1 << refinement;
  for (auto [a, b] : s_panels) {
    for (int p = 0; p < sub; ++p) append_panel(a + (b - a) * p / sub, a + (b - a) * (p + 1) / sub, s_nodes_, s_wk_, s_wg_);
  }

  // Kernel tables k_s(m), m = 0..radius, Kronrod and Gauss in theta.
  stride_ = static_cast<std::size_t>(radius_) + 1;
  const std::size_t nq = theta_nodes_.size();
  std::vector<double> cos_table(nq * stride_);
  for (std::size_t q = 0; q < nq; ++q) {
    for (std::size_t m = 0; m < stride_; ++m) cos_table[q * stride_ + m] = std::cos(static_cast<double>(m) * theta_nodes_[q]);
  }
  kern_k_.assign(s_nodes_.size() * stride_, 0.0);
  kern_g_.assign(s_nodes_.size() * stride_, 0.0);
  std::vector<double> ek(nq), eg(nq);
  for (std::size_t si = 0; si < s_nodes_.size(); ++si) {
    const double s = s_nodes_[si];
    for (std::size_t q = 0; q < nq; ++q) {
      const double e = std::exp(-s * one_minus_psi_[q]);
      ek[q] = theta_wk_[q] * e / pi;
      eg[q] = theta_wg_[q] * e / pi;
    }
    double* rk = &kern_k_[si * stride_];
    double* rg = &kern_g_[si * stride_];
    for (std::size_t q = 0; q < nq; ++q) {
      const double* c = &cos_table[q * stride_];
      const double wk = ek[q], wg = eg[q];
      for (std::size_t m = 0; m < stride_; ++m) {
        rk[m] += wk * c[m];
        rg[m] += wg * c[m];
      }
    }
  }
  std::unique_lock lock(cache_mutex_);
  cache_.clear();
}

double QuadratureGreen::axis_kernel(double s, std::int64_t m) const {
  double v = 0.0;
  for (std::size_t q = 0; q < theta_nodes_.size(); ++q) {
    v += theta_wk_[q] * std::cos(static_cast<double>(m) * theta_nodes_[q]) * std::exp(-s * one_minus_psi_[q]);
  }
  return v / std::numbers::pi;
}

GreenValue QuadratureGreen::compute(const LatticePoint& c) const {
  const double pref = d_ / (1.0 - loop_prob_);
  double v_kk = 0.0, v_gk = 0.0, v_kg = 0.0;
  for (std::size_t si = 0; si < s_nodes_.size(); ++si) {
    double pk = 1.0, pg = 1.0;
    const double* rk = &kern_k_[si * stride_];
    const double* rg = &kern_g_[si * stride_];
    for (int i = 0; i < d_; ++i) {
      pk *= rk[c[i]];
      pg *= rg[c[i]];
    }
    v_kk += s_wk_[si] * pk;
    v_gk += s_wk_[si] * pg;
    v_kg += s_wg_[si] * pk;
  }
  GreenValue out;
  out.value = pref * v_kk;
  out.error = pref * (std::abs(v_kk - v_gk) + std::abs(v_kk - v_kg)) + tail_bound_ + theta_floor_error_ +
              64.0 * std::numeric_limits<double>::epsilon() * out.value;
  return out;
}

GreenValue QuadratureGreen::evaluate(const LatticePoint& z) const {
  if (z.dim() != d_) throw Error(ErrorCode::kDimensionMismatch, "displacement dimension differs");
  if (z.chebyshev_norm() > radius_) {
    throw Error(ErrorCode::kDisplacementOutOfRange,
                "displacement " + z.to_string() + " beyond quadrature radius " + std::to_string(radius_));
  }
  const LatticePoint c = z.canonical_abs();
  {
    std::shared_lock lock(cache_mutex_);
    auto it = cache_.find(c);
    if (it != cache_.end()) return it->second;
  }
  const GreenValue v = compute(c);
  if (v.error > tol_) {
    throw Error(ErrorCode::kToleranceUnreachable, "quadrature error above tol at " + z.to_string());
  }
  std::unique_lock lock(cache_mutex_);
  cache_[c] = v;
  return v;
}

GreenValue quadrature_green(const StepLaw& law, const LatticePoint& x, double tol) {
  QuadratureOptions opts;
  opts.tol = tol;
  QuadratureGreen q(law, x.chebyshev_norm(), opts);
  return q.evaluate(x);
}

std::string to_string(GreenMethod m) {
  return m == GreenMethod::kQuadrature ? "quadrature" : "convolution-oracle";
}

GreenTable::GreenTable(int d, std::string fingerprint, std::int64_t radius, GreenMethod method)
    : d_(d), fingerprint_(std::move(fingerprint)), radius_(radius), method_(method) {}

void GreenTable::set(const LatticePoint& x, GreenValue v) {
  if (x.dim() != d_) throw Error(ErrorCode::kDimensionMismatch, "table entry dimension differs");
  entries_[x.canonical_abs()] = v;
  max_error_ = std::max(max_error_, v.error);
}

GreenValue GreenTable::evaluate(const LatticePoint& z) const {
  if (z.dim() != d_) throw Error(ErrorCode::kDimensionMismatch, "displacement dimension differs");
  auto it = entries_.find(z.canonical_abs());
  if (it == entries_.end()) {
    throw Error(ErrorCode::kDisplacementOutOfRange, "displacement " + z.to_string() + " not tabulated");
  }
  return it->second;
}

namespace {

void enumerate_canonical(int d, std::int64_t radius, std::vector<LatticePoint>& out) {
  LatticePoint p(d);
  auto rec = [&](auto&& self, int i, std::int64_t lo) -> void {
    if (i == d) {
      out.push_back(p);
      return;
    }
    for (std::int64_t v = lo; v <= radius; ++v) {
      p[i] = v;
      self(self, i + 1, v);
    }
  };
  rec(rec, 0, 0);
}

}  // namespace

GreenTable tabulate(const QuadratureGreen& q, std::int64_t radius) {
  GreenTable table(q.dim(), q.law_fingerprint(), radius, GreenMethod::kQuadrature);
  std::vector<LatticePoint> pts;
  enumerate_canonical(q.dim(), radius, pts);
  for (const auto& p : pts) table.set(p, q.evaluate(p));
  return table;
}

std::vector<LatticePoint> canonical_points(int d, std::int64_t radius) {
  std::vector<LatticePoint> pts;
  enumerate_canonical(d, radius, pts);
  return pts;
}

GreenValue mutual_energy(const std::vector<LatticePoint>& a, const std::vector<LatticePoint>& b,
                         const GreenEvaluator& green) {
  GreenValue total;
  for (const auto& x : a) {
    for (const auto& y : b) {
      const GreenValue g = green.evaluate(y - x);
      total.value += g.value;
      total.error += g.error;
    }
  }
  return total;
}

std::vector<CrossGreenPoint> cross_green_estimate(const StepLaw& law, const GreenEvaluator& near_green,
                                                  const std::vector<std::int64_t>& n_values, std::int64_t replicas,
                                                  std::uint64_t seed, const CrossGreenOptions& opts) {
  if (replicas < 2) throw Error(ErrorCode::kInsufficientReplicas, "cross_green_estimate needs >= 2 replicas");
  if (n_values.empty()) throw Error(ErrorCode::kInvalidParameter, "no n values");
  std::int64_t n_max = 0;
  for (auto n : n_values) {
    if (n < 0) throw Error(ErrorCode::kInvalidParameter, "n must be >= 0");
    n_max = std::max(n_max, n);
  }
  if (n_max > opts.max_n) {
    throw Error(ErrorCode::kDisplacementOutOfRange, "n above the certified limit " + std::to_string(opts.max_n));
  }
  if (near_green.max_radius() < opts.near_radius) {
    throw Error(ErrorCode::kDisplacementOutOfRange, "near-field evaluator radius below near_radius");
  }
  const double k0 = static_cast<double>(opts.roulette_k0 > 0 ? opts.roulette_k0 : std::max<std::int64_t>(16, 2 * n_max));
  const double beta = opts.roulette_beta;
  if (!(beta > 1.0)) throw Error(ErrorCode::kInvalidParameter, "roulette beta must exceed 1");

  const std::size_t nv = n_values.size();
  std::vector<std::vector<double>> per_replica(static_cast<std::size_t>(replicas), std::vector<double>(nv));
  std::vector<std::vector<double>> per_replica_sys(static_cast<std::size_t>(replicas), std::vector<double>(nv));

  parallel_for(static_cast<std::size_t>(replicas), opts.workers, [&](std::size_t r) {
    const RangeState wa = simulate_path(law, n_max, StreamId{seed, stream_tag(StreamPurpose::kCrossA, r), 0});
    const RangeState wb = simulate_path(law, n_max, StreamId{seed, stream_tag(StreamPurpose::kCrossB, r), 0});
    std::vector<std::pair<LatticePoint, std::int64_t>> sa, sb;
    wa.visited().for_each([&](const LatticePoint& p, std::int64_t f) { sa.emplace_back(p, f); });
    wb.visited().for_each([&](const LatticePoint& p, std::int64_t f) { sb.emplace_back(p, f); });
    auto by_time = [](const auto& u, const auto& v) { return u.second < v.second; };
    std::sort(sa.begin(), sa.end(), by_time);
    std::sort(sb.begin(), sb.end(), by_time);

    // (time at which the pair enters G(R_n, R~_n), contribution, systematic error)
    std::vector<std::tuple<std::int64_t, double, double>> events;
    for (const auto& [x, f] : sa) {
      for (const auto& [y, g] : sb) {
        const LatticePoint z = y - x;
        if (z.chebyshev_norm() <= opts.near_radius) {
          const GreenValue gv = near_green.evaluate(z);
          events.emplace_back(std::max(f, g), gv.value, gv.error);
        }
      }
    }
    for (std::size_t i = 0; i < sa.size(); ++i) {
      const auto& [x, f] = sa[i];
      StreamRng rng(StreamId{seed, stream_tag(StreamPurpose::kCrossAux, r), i});
      const double u = rng.uniform_open01();
      const double horizon = k0 * std::pow(u, -1.0 / beta);
      LatticePoint pos = x;
      for (std::int64_t k = 1; static_cast<double>(k) <= horizon; ++k) {
        law.step(pos, rng);
        const LatticePoint z = pos - x;
        if (z.chebyshev_norm() <= opts.near_radius) continue;
        const std::int64_t g = wb.visited().first_visit(pos);
        if (g == SiteSet::kEmpty) continue;
        const double w = std::max(1.0, std::pow(static_cast<double>(k) / k0, beta));
        events.emplace_back(std::max(f, g), w, 0.0);
      }
    }
    std::sort(events.begin(), events.end(),
              [](const auto& u, const auto& v) { return std::get<0>(u) < std::get<0>(v); });
    std::size_t e = 0;
    double acc = 0.0, acc_sys = 0.0;
    std::vector<std::size_t> order(nv);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return n_values[i] < n_values[j]; });
    for (std::size_t oi : order) {
      while (e < events.size() && std::get<0>(events[e]) <= n_values[oi]) {
        acc += std::get<1>(events[e]);
        acc_sys += std::get<2>(events[e]);
        ++e;
      }
      per_replica[r][oi] = acc;
      per_replica_sys[r][oi] = acc_sys;
    }
  });

  std::vector<CrossGreenPoint> out(nv);
  const double m = static_cast<double>(replicas);
  for (std::size_t j = 0; j < nv; ++j) {
    double mean = 0.0, sys = 0.0;
    for (std::size_t r = 0; r < per_replica.size(); ++r) {
      mean += per_replica[r][j];
      sys += per_replica_sys[r][j];
    }
    mean /= m;
    bool constant = true;
    for (std::size_t r = 1; r < per_replica.size(); ++r) constant = constant && per_replica[r][j] == per_replica[0][j];
    if (constant) mean = per_replica[0][j];  // n = 0: every replica holds exactly G(0,0)
    double ss = 0.0;
    for (std::size_t r = 0; r < per_replica.size(); ++r) ss += (per_replica[r][j] - mean) * (per_replica[r][j] - mean);
    out[j].n = n_values[j];
    out[j].mean = mean;
    out[j].std_error = std::sqrt(ss / (m - 1.0) / m);
    out[j].systematic_error = sys / m;
  }
  return out;
}

}  // namespace stablewalk
