#include "stablewalk/capacity.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "stablewalk/error.hpp"
#include "stablewalk/parallel.hpp"
#include "stablewalk/site_set.hpp"

namespace stablewalk {
namespace {

struct GreenMatrix {
  Eigen::MatrixXd g;
  Eigen::MatrixXd eps;
};

GreenMatrix build_matrix(const std::vector<LatticePoint>& sites, const GreenEvaluator& green) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  GreenMatrix m{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sites[i].dim() != green.dim()) throw Error(ErrorCode::kDimensionMismatch, "set and Green evaluator differ in d");
    for (Eigen::Index j = 0; j <= i; ++j) {
      const GreenValue v = green.evaluate(sites[j] - sites[i]);
      m.g(i, j) = m.g(j, i) = v.value;
      m.eps(i, j) = m.eps(j, i) = v.error;
    }
  }
  return m;
}

double min_eigenvalue(const Eigen::MatrixXd& g, double& max_eig) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::kSingularSystem, "eigenvalue iteration failed");
  max_eig = es.eigenvalues().maxCoeff();
  return es.eigenvalues().minCoeff();
}

// Bound on |1^T G_true^{-1} 1 - 1^T G^{-1} 1| given the solution e of G e = 1.
double propagated_error(const Eigen::VectorXd& e, const Eigen::MatrixXd& eps, double lambda_min, double& e_shift) {
  const double eps_f = eps.norm();
  const double eta = eps_f / lambda_min;
  if (eta >= 1.0) throw Error(ErrorCode::kIllConditioned, "Green errors exceed the smallest eigenvalue");
  const Eigen::VectorXd ae = e.cwiseAbs();
  const double first = ae.dot(eps * ae);
  const double e2 = e.squaredNorm();
  e_shift = eta / (1.0 - eta) * std::sqrt(e2);
  const double rounding = 1e-14 * static_cast<double>(e.size()) * e2 * (1.0 + 1.0 / lambda_min);
  return first + eps_f * e2 * eta / (1.0 - eta) + rounding;
}

void check_range(const Eigen::VectorXd& e, double shift, double tol) {
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (e[i] < -tol - shift || e[i] > 1.0 + tol + shift) {
      throw Error(ErrorCode::kEquilibriumOutOfRange,
                  "equilibrium weight " + std::to_string(e[i]) + " outside [0, 1]: Green values inconsistent");
    }
  }
}

std::vector<LatticePoint> normalize_set(std::vector<LatticePoint> a) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

std::string to_string(CapacityMethod m) {
  return m == CapacityMethod::kEquilibriumSolve ? "equilibrium-solve" : "mc-escape";
}

CapacityMethod capacity_method_from_string(const std::string& s) {
  if (s == "equilibrium-solve") return CapacityMethod::kEquilibriumSolve;
  if (s == "mc-escape") return CapacityMethod::kMcEscape;
  throw Error(ErrorCode::kConfigInvalid, "unknown capacity estimator '" + s + "'");
}

CapacityEstimate equilibrium_capacity(std::vector<LatticePoint> a, const GreenEvaluator& green,
                                      const EquilibriumOptions& opts) {
  a = normalize_set(std::move(a));
  CapacityEstimate out;
  out.method = CapacityMethod::kEquilibriumSolve;
  out.set_size = a.size();
  if (a.empty()) return out;
  if (a.size() > opts.max_size) {
    throw Error(ErrorCode::kInvalidParameter, "set larger than the solver cap " + std::to_string(opts.max_size));
  }
  const GreenMatrix m = build_matrix(a, green);
  Eigen::LLT<Eigen::MatrixXd> llt(m.g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kSingularSystem, "Green matrix is not positive definite");
  double lambda_max = 0.0;
  const double lambda_min = min_eigenvalue(m.g, lambda_max);
  if (lambda_min <= 0.0) throw Error(ErrorCode::kSingularSystem, "Green matrix is not positive definite");
  out.condition = lambda_max / lambda_min;
  if (out.condition * green.tolerance() > opts.max_amplification) {
    throw Error(ErrorCode::kIllConditioned, "condition " + std::to_string(out.condition) +
                                                " times Green tolerance exceeds the amplification limit");
  }
  const Eigen::VectorXd e = llt.solve(Eigen::VectorXd::Ones(m.g.rows()));
  double shift = 0.0;
  out.error_bound = propagated_error(e, m.eps, lambda_min, shift);
  check_range(e, shift, opts.range_tol);
  out.value = e.sum();
  out.equilibrium.assign(e.data(), e.data() + e.size());
  return out;
}

PrefixCapacities prefix_capacities(const std::vector<LatticePoint>& sites, const GreenEvaluator& green,
                                   const EquilibriumOptions& opts) {
  PrefixCapacities out;
  out.values.assign(1, 0.0);
  out.errors.assign(1, 0.0);
  if (sites.empty()) return out;
  if (sites.size() > opts.max_size) {
    throw Error(ErrorCode::kInvalidParameter, "set larger than the solver cap " + std::to_string(opts.max_size));
  }
  const GreenMatrix m = build_matrix(sites, green);
  Eigen::LLT<Eigen::MatrixXd> llt(m.g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::kSingularSystem, "Green matrix is not positive definite");
  double lambda_max = 0.0;
  // Eigenvalue interlacing: every leading block has lambda_min at least this.
  const double lambda_min = min_eigenvalue(m.g, lambda_max);
  if (lambda_min <= 0.0) throw Error(ErrorCode::kSingularSystem, "Green matrix is not positive definite");
  out.condition = lambda_max / lambda_min;
  if (out.condition * green.tolerance() > opts.max_amplification) {
    throw Error(ErrorCode::kIllConditioned, "condition " + std::to_string(out.condition) +
                                                " times Green tolerance exceeds the amplification limit");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::VectorXd y(n);
  double running = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    double s = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) s -= l(k, j) * y[j];
    y[k] = s / l(k, k);
    running += y[k] * y[k];
    const Eigen::VectorXd e =
        l.topLeftCorner(k + 1, k + 1).transpose().triangularView<Eigen::Upper>().solve(y.head(k + 1));
    double shift = 0.0;
    out.errors.push_back(propagated_error(e, m.eps.topLeftCorner(k + 1, k + 1), lambda_min, shift));
    check_range(e, shift, opts.range_tol);
    out.values.push_back(running);
  }
  return out;
}

PrefixCapacities path_capacities(const RangeState& path, const GreenEvaluator& green,
                                 const EquilibriumOptions& opts) {
  if (!path.has_path_log()) throw Error(ErrorCode::kInsufficientPath, "path_capacities needs a path log");
  const auto& log = path.path_log();
  SiteSet seen(path.dim(), log.size());
  std::vector<LatticePoint> order;
  std::vector<std::size_t> count_at;
  for (std::size_t k = 0; k < log.size(); ++k) {
    if (seen.insert(log[k], static_cast<std::int64_t>(k))) order.push_back(log[k]);
    count_at.push_back(order.size());
  }
  const PrefixCapacities by_size = prefix_capacities(order, green, opts);
  PrefixCapacities out;
  out.condition = by_size.condition;
  for (std::size_t c : count_at) {
    out.values.push_back(by_size.values[c]);
    out.errors.push_back(by_size.errors[c]);
  }
  return out;
}

namespace {

class MembershipTest {
 public:
  explicit MembershipTest(const std::vector<LatticePoint>& a) : list_(a), set_(a.empty() ? 1 : a.front().dim(), a.size()) {
    if (a.size() > 16) {
      for (const auto& p : a) set_.insert(p, 0);
    }
  }
  bool operator()(const LatticePoint& p) const {
    if (list_.size() > 16) return set_.contains(p);
    return std::find(list_.begin(), list_.end(), p) != list_.end();
  }

 private:
  const std::vector<LatticePoint>& list_;
  SiteSet set_;
};

struct PointStats {
  double mean = 0.0;
  double var = 0.0;
};

// Escape trials from `x`: each trial scores 1 - w, with w the roulette weight of
// a return to A within the horizon (0 when none).
PointStats escape_trials(const LatticePoint& x, const MembershipTest& in_a, const StepLaw& law, StreamRng& rng,
                         std::int64_t horizon, std::int64_t trials, std::int64_t k0, double beta) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    LatticePoint pos = x;
    double score = 1.0;
    for (std::int64_t k = 1; k <= horizon; ++k) {
      if (k > k0) {
        const double survive = std::pow(static_cast<double>(k - 1) / static_cast<double>(k), beta);
        if (rng.uniform01() >= survive) break;
      }
      law.step(pos, rng);
      if (in_a(pos)) {
        score = k > k0 ? 1.0 - std::pow(static_cast<double>(k) / static_cast<double>(k0), beta) : 0.0;
        break;
      }
    }
    sum += score;
    sum_sq += score * score;
  }
  PointStats s;
  const auto n = static_cast<double>(trials);
  s.mean = sum / n;
  s.var = trials > 1 ? std::max(0.0, (sum_sq - n * s.mean * s.mean) / (n - 1.0)) : 0.0;
  return s;
}

struct EscapeRun {
  double value = 0.0;
  double std_error = 0.0;
};

EscapeRun escape_run(const std::vector<LatticePoint>& a, const MembershipTest& in_a, const StepLaw& law,
                     std::uint64_t seed, std::uint64_t tag, std::int64_t horizon, std::int64_t trials,
                     const EscapeOptions& opts) {
  std::vector<PointStats> stats(a.size());
  parallel_for(a.size(), opts.workers, [&](std::size_t i) {
    StreamRng rng(StreamId{seed, stream_tag(StreamPurpose::kEscape, i), 256 + tag});
    stats[i] = escape_trials(a[i], in_a, law, rng, horizon, trials, opts.roulette_k0, opts.roulette_beta);
  });
  EscapeRun r;
  double var = 0.0;
  for (const auto& s : stats) {
    r.value += s.mean;
    var += s.var / static_cast<double>(trials);
  }
  r.std_error = std::sqrt(var);
  return r;
}

}  // namespace

CapacityEstimate mc_escape_capacity(std::vector<LatticePoint> a, const StepLaw& law, std::uint64_t seed,
                                    const EscapeOptions& opts) {
  if (opts.horizon < 1) throw Error(ErrorCode::kInvalidParameter, "horizon must be >= 1");
  if (opts.trials_per_point < 1) throw Error(ErrorCode::kInvalidParameter, "trials_per_point must be >= 1");
  if (opts.roulette_k0 < 1 || !(opts.roulette_beta > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "roulette parameters must be positive");
  }
  a = normalize_set(std::move(a));
  CapacityEstimate out;
  out.method = CapacityMethod::kMcEscape;
  out.set_size = a.size();
  if (a.empty()) return out;
  for (const auto& p : a) {
    if (p.dim() != law.dim()) throw Error(ErrorCode::kDimensionMismatch, "set and law differ in d");
  }
  const MembershipTest in_a(a);
  std::int64_t horizon = opts.horizon;
  for (int round = 0;; ++round) {
    const EscapeRun main = escape_run(a, in_a, law, seed, 2 * static_cast<std::uint64_t>(round), horizon,
                                      opts.trials_per_point, opts);
    out.value = main.value;
    out.std_error = main.std_error;
    out.horizon = horizon;
    out.stability_gap.reset();
    if (!opts.stability_run) break;
    const EscapeRun check = escape_run(a, in_a, law, seed, 2 * static_cast<std::uint64_t>(round) + 1, 2 * horizon,
                                       std::max<std::int64_t>(1, opts.trials_per_point / 2), opts);
    out.stability_gap = std::abs(main.value - check.value);
    if (opts.gap_tolerance <= 0.0 || *out.stability_gap < opts.gap_tolerance || round >= opts.max_doublings) break;
    horizon *= 2;
  }
  return out;
}

ProcessSample capacity_process(const StepLaw& law, std::int64_t n, const TimeGrid& grid,
                               const CapacityProcessConfig& cfg, std::uint64_t seed, std::uint64_t replica) {
  if (n < 1) throw Error(ErrorCode::kInvalidParameter, "n must be positive");
  ProcessSample out;
  out.n = n;
  out.t_grid = grid.values();
  out.floor_nt = grid.floors(n);
  out.replica_id = replica;
  out.seed = seed;
  const bool exact = cfg.estimator == CapacityMethod::kEquilibriumSolve;
  if (exact && cfg.green == nullptr) throw Error(ErrorCode::kInvalidParameter, "equilibrium-solve needs a Green evaluator");
  if (!exact && cfg.escape_horizon < 1) throw Error(ErrorCode::kInvalidParameter, "escape horizon must be >= 1");

  RangeState state(law);
  StreamRng rng(walk_stream(seed, replica));
  std::vector<LatticePoint> order{state.position()};
  std::vector<std::int64_t> first{0};
  for (std::int64_t target : out.floor_nt) {
    while (state.step_count() < target) {
      if (state.advance(rng)) {
        order.push_back(state.position());
        first.push_back(state.step_count());
      }
    }
    out.range_values.push_back(static_cast<std::int64_t>(state.cardinality()));
  }

  if (exact) {
    const PrefixCapacities caps = prefix_capacities(order, *cfg.green, cfg.equilibrium);
    for (std::int64_t card : out.range_values) out.cap_values.push_back(caps.values[static_cast<std::size_t>(card)]);
    return out;
  }

  // hit[j]: earliest first-visit time among the sites hit by the escape walk of
  // site j; site j escapes R_m (m >= first[j]) iff hit[j] > m.
  const SiteSet& visited = state.visited();
  // The point field carries the purpose byte of `replica` so that tagged
  // replicas (centering pools) get their own escape streams.
  StreamRng esc(StreamId{seed, stream_tag(StreamPurpose::kEscape, replica), replica >> 56});
  std::vector<std::int64_t> hit(order.size(), INT64_MAX);
  for (std::size_t j = 0; j < order.size(); ++j) {
    LatticePoint pos = order[j];
    std::int64_t h = INT64_MAX;
    for (std::int64_t k = 0; k < cfg.escape_horizon; ++k) {
      law.step(pos, esc);
      const std::int64_t f = visited.first_visit(pos);
      if (f != SiteSet::kEmpty && f < h) {
        h = f;
        if (h <= first[j]) break;
      }
    }
    hit[j] = h;
  }
  for (std::int64_t m : out.floor_nt) {
    double c = 0.0;
    for (std::size_t j = 0; j < order.size() && first[j] <= m; ++j) c += hit[j] > m ? 1.0 : 0.0;
    out.cap_values.push_back(c);
  }
  return out;
}

DecompositionReport decomposition_bounds_check(const std::vector<LatticePoint>& a, const std::vector<LatticePoint>& b,
                                               const GreenEvaluator& green, const EquilibriumOptions& opts) {
  DecompositionReport r;
  r.cap_a = equilibrium_capacity(a, green, opts);
  r.cap_b = equilibrium_capacity(b, green, opts);
  std::vector<LatticePoint> u = a;
  u.insert(u.end(), b.begin(), b.end());
  r.cap_union = equilibrium_capacity(u, green, opts);
  r.mutual = mutual_energy(normalize_set(a), normalize_set(b), green);
  const double caps_err = r.cap_a.error_bound + r.cap_b.error_bound + r.cap_union.error_bound;
  r.tolerance = caps_err + 2.0 * r.mutual.error + 1e-12 * (1.0 + r.cap_a.value + r.cap_b.value);
  r.upper_slack = r.cap_a.value + r.cap_b.value - r.cap_union.value;
  r.lower_slack = r.cap_union.value - r.cap_a.value - r.cap_b.value + 2.0 * r.mutual.value;
  r.subadditive = r.upper_slack >= -r.tolerance;
  r.lower_bound = r.lower_slack >= -r.tolerance;
  return r;
}

}  // namespace stablewalk
