#include "stablewalk/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "report_json.hpp"
#include "stablewalk/capacity.hpp"
#include "stablewalk/error.hpp"
#include "stablewalk/parallel.hpp"

namespace stablewalk {
namespace {

using ojson = nlohmann::ordered_json;

std::size_t grid_index(const std::vector<double>& grid, double t, const std::string& what) {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (std::abs(grid[j] - t) <= 1e-9) return j;
  }
  throw Error(ErrorCode::kConfigInvalid, what + " time " + format_double(t) + " is not on t_grid");
}

double column_mean(const std::vector<ProcessSample>& s, std::size_t j, bool capacity) {
  double m = 0.0;
  for (const auto& p : s) m += capacity ? p.cap_values[j] : static_cast<double>(p.range_values[j]);
  return m / static_cast<double>(s.size());
}

NormalityOptions normality_options(const RunConfig& cfg) {
  NormalityOptions o;
  o.bootstrap = cfg.bootstrap;
  o.seed = cfg.seed;
  o.ks_alpha = cfg.tolerance("ks_alpha");
  o.max_abs_skewness = cfg.tolerance("max_abs_skewness");
  o.max_abs_excess_kurtosis = cfg.tolerance("max_abs_excess_kurtosis");
  return o;
}

std::string coefficients_label(const std::vector<double>& c) {
  std::string s = "[";
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + format_double(c[i]);
  return s + "]";
}

ojson law_json(const LawSpec& l) {
  return {{"d", l.d}, {"alpha", l.alpha}, {"loop_prob", l.loop_prob}, {"family", to_string(l.family)}};
}

ojson point_json(const LatticePoint& p) {
  ojson a = ojson::array();
  for (auto c : p.coords()) a.push_back(c);
  return a;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

void emit(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

std::unique_ptr<QuadratureGreen> make_green(const StepLaw& law, const RunConfig& cfg, std::int64_t radius) {
  QuadratureOptions q;
  q.tol = cfg.green_tol;
  return std::make_unique<QuadratureGreen>(law, radius, q);
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::kPass: return "PASS";
    case Status::kFail: return "FAIL";
    case Status::kInconclusive: return "INCONCLUSIVE";
  }
  return "FAIL";
}

Status combine(Status a, Status b) {
  if (a == Status::kFail || b == Status::kFail) return Status::kFail;
  if (a == Status::kInconclusive || b == Status::kInconclusive) return Status::kInconclusive;
  return Status::kPass;
}

Status status_of(const Error& e) {
  return e.code() == ErrorCode::kInsufficientReplicas ? Status::kInconclusive : Status::kFail;
}

std::vector<ProcessSample> simulate_replicas(const RunConfig& cfg, std::int64_t count, StreamPurpose purpose,
                                             bool with_capacity, const GreenEvaluator* green) {
  const StepLaw law = cfg.law.build();
  const TimeGrid grid = TimeGrid::from_decimals(cfg.t_grid);
  CapacityProcessConfig pc;
  pc.estimator = cfg.estimator;
  pc.escape_horizon = cfg.escape_horizon;
  pc.green = green;
  std::vector<ProcessSample> out(static_cast<std::size_t>(count));
  parallel_for(out.size(), cfg.workers, [&](std::size_t i) {
    const std::uint64_t id = stream_tag(purpose, i);
    out[i] = with_capacity ? capacity_process(law, cfg.n, grid, pc, cfg.seed, id)
                           : range_cardinality_process(law, cfg.n, grid, cfg.seed, id);
    out[i].replica_id = i;
  });
  return out;
}

std::string samples_csv(const std::vector<ProcessSample>& samples) {
  const bool cap = !samples.empty() && !samples.front().cap_values.empty();
  std::string s = cap ? "replica,t,floor_nt,range_card,cap\n" : "replica,t,floor_nt,range_card\n";
  for (const auto& p : samples) {
    for (std::size_t j = 0; j < p.t_grid.size(); ++j) {
      s += std::to_string(p.replica_id);
      s += ',';
      s += format_double(p.t_grid[j]);
      s += ',';
      s += std::to_string(p.floor_nt[j]);
      s += ',';
      s += std::to_string(p.range_values[j]);
      if (cap) {
        s += ',';
        s += format_double(p.cap_values[j]);
      }
      s += '\n';
    }
  }
  return s;
}

bool FcltAnalysis::passed() const {
  bool ok = variance_linearity.passed() && normality_t1.passed() && fdd_covariance.passed();
  for (const auto& r : cramer_wold) ok = ok && r.passed();
  for (const auto& r : condition_ii) ok = ok && r.passed();
  return ok;
}

FcltAnalysis analyze_fclt(const RunConfig& cfg, const std::vector<ProcessSample>& samples,
                          const std::vector<ProcessSample>& centering, bool capacity) {
  if (samples.size() < 2) throw Error(ErrorCode::kInsufficientReplicas, "need at least two replicas");
  FcltAnalysis a;
  a.process = capacity ? "capacity" : "range";
  const std::vector<double>& grid = samples.front().t_grid;
  const std::vector<std::int64_t>& floors = samples.front().floor_nt;
  const std::size_t k = grid.size();
  const std::size_t m = samples.size();
  auto value = [&](const ProcessSample& p, std::size_t j) {
    return capacity ? p.cap_values[j] : static_cast<double>(p.range_values[j]);
  };
  const auto& pool = centering.empty() ? samples : centering;
  std::vector<double> center(k);
  for (std::size_t j = 0; j < k; ++j) center[j] = column_mean(pool, j, capacity);

  const double n = static_cast<double>(cfg.n);
  const double t_max = grid.back();
  {
    const double mean = column_mean(samples, k - 1, capacity);
    double var = 0.0;
    for (const auto& p : samples) var += (value(p, k - 1) - mean) * (value(p, k - 1) - mean);
    var /= static_cast<double>(m - 1);
    if (!(var > 0.0)) throw Error(ErrorCode::kDegenerateSample, "zero variance at the largest time");
    a.sigma_hat = std::sqrt(var / (n * t_max));
  }
  const double scale = 1.0 / (a.sigma_hat * std::sqrt(n));
  SampleMatrix x(m, std::vector<double>(k));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < k; ++j) x[r][j] = (value(samples[r], j) - center[j]) * scale;
  }

  // Var over replicas at each requested n = floor(n t_j).
  for (std::int64_t nv : cfg.n_values) {
    const auto it = std::find(floors.begin(), floors.end(), nv);
    if (it == floors.end()) {
      throw Error(ErrorCode::kConfigInvalid, "n_values entry " + std::to_string(nv) + " is not floor(n t) on t_grid");
    }
    const auto j = static_cast<std::size_t>(it - floors.begin());
    const double mean = column_mean(samples, j, capacity);
    double var = 0.0;
    for (const auto& p : samples) var += (value(p, j) - mean) * (value(p, j) - mean);
    a.variance_pairs.emplace_back(static_cast<double>(nv), var / static_cast<double>(m - 1));
  }
  a.variance_fit = growth_exponent(a.variance_pairs);
  a.variance_linearity.name = "variance_linearity";
  a.variance_linearity.sample_size = m;
  a.variance_linearity.add("slope", a.variance_fit.slope);
  a.variance_linearity.add("slope_ci_low", a.variance_fit.ci_low);
  a.variance_linearity.add("slope_ci_high", a.variance_fit.ci_high);
  for (const auto& [nv, var] : a.variance_pairs) {
    a.variance_linearity.add("var_over_n@" + std::to_string(static_cast<std::int64_t>(nv)), var / nv);
  }
  const double lo = cfg.tolerance("variance_slope_min");
  const double hi = cfg.tolerance("variance_slope_max");
  a.variance_linearity.verdicts.push_back(
      {"slope_at_least", a.variance_fit.slope >= lo, a.variance_fit.slope, lo, "variance_slope_min"});
  a.variance_linearity.verdicts.push_back(
      {"slope_at_most", a.variance_fit.slope <= hi, a.variance_fit.slope, hi, "variance_slope_max"});

  const NormalityOptions nopt = normality_options(cfg);
  std::vector<double> last(m);
  for (std::size_t r = 0; r < m; ++r) last[r] = x[r][k - 1];
  a.normality_t1 = normality_report(last, nopt);
  a.normality_t1.name = "normality_t=" + format_double(t_max);
  a.normality_t1.sigma_hat = a.sigma_hat;

  std::vector<std::size_t> fdd_idx;
  for (double t : cfg.fdd_grid) fdd_idx.push_back(grid_index(grid, t, "fdd_grid"));
  SampleMatrix fdd(m, std::vector<double>(fdd_idx.size()));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t i = 0; i < fdd_idx.size(); ++i) fdd[r][i] = x[r][fdd_idx[i]];
  }
  CovarianceOptions copt;
  copt.bootstrap = cfg.bootstrap;
  copt.seed = cfg.seed;
  copt.rel_tol = cfg.tolerance("covariance_rel_tol");
  a.fdd_covariance = fdd_covariance_report(fdd, cfg.fdd_grid, copt);

  const std::vector<double> zero(fdd_idx.size(), 0.0);
  for (const auto& nu : cfg.projections) {
    TestReport r = normality_report(cramer_wold_projection(fdd, zero, nu), nopt);
    r.name = "cramer_wold" + coefficients_label(nu);
    a.cramer_wold.push_back(std::move(r));
  }

  ConditionIIOptions c2;
  c2.h_values = cfg.h_values;
  c2.epsilon = cfg.epsilon;
  c2.ceiling = cfg.tolerance("condition_ii_ceiling");
  for (const auto& rule : cfg.stop_rules) {
    a.condition_ii.push_back(condition_ii_proxy(x, grid, rule, c2));
    a.condition_ii.back().name += " " + rule.describe();
  }
  return a;
}

FcltRun run_fclt(const RunConfig& cfg, bool capacity) {
  check_regime(cfg, capacity ? Experiment::kFcltCapacity : Experiment::kFcltRange);
  if (cfg.replicas < 500) {
    throw Error(ErrorCode::kInsufficientReplicas, "FCLT harness needs >= 500 replicas, got " +
                                                      std::to_string(cfg.replicas));
  }
  std::unique_ptr<QuadratureGreen> green;
  if (capacity && cfg.estimator == CapacityMethod::kEquilibriumSolve) {
    green = make_green(cfg.law.build(), cfg, cfg.green_radius);
  }
  FcltRun run;
  run.samples = simulate_replicas(cfg, cfg.replicas, StreamPurpose::kWalk, capacity, green.get());
  const auto pool = simulate_replicas(cfg, cfg.centering_replicas, StreamPurpose::kCentering, capacity, green.get());
  run.analysis = analyze_fclt(cfg, run.samples, pool, capacity);
  return run;
}

std::string fclt_report_json(const RunConfig& cfg, const FcltAnalysis& a) {
  ojson j;
  j["experiment"] = a.process == "capacity" ? "fclt cap" : "fclt range";
  j["config"] = ojson::parse(cfg.to_json());
  j["tolerances"] = cfg.tolerances;
  j["process"] = a.process;
  j["sigma_hat"] = a.sigma_hat;
  ojson pairs = ojson::array();
  for (const auto& [n, v] : a.variance_pairs) pairs.push_back({{"n", n}, {"variance", v}});
  j["variance_linearity"] = {{"pairs", pairs}, {"fit", fit_to_json(a.variance_fit)},
                             {"report", report_to_json(a.variance_linearity)}};
  j["normality_t1"] = report_to_json(a.normality_t1);
  j["fdd_covariance"] = report_to_json(a.fdd_covariance);
  ojson cw = ojson::array();
  for (const auto& r : a.cramer_wold) cw.push_back(report_to_json(r));
  j["cramer_wold"] = cw;
  ojson c2 = ojson::array();
  for (const auto& r : a.condition_ii) c2.push_back(report_to_json(r));
  j["condition_ii_proxy"] = c2;
  j["pass"] = a.passed();
  return dump(j);
}

std::vector<IntersectionPoint> intersection_means(const RunConfig& cfg) {
  check_regime(cfg, Experiment::kIntersections);
  if (cfg.replicas < 2) throw Error(ErrorCode::kInsufficientReplicas, "need >= 2 replica pairs");
  const StepLaw law = cfg.law.build();
  std::vector<std::int64_t> ns = cfg.n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  const std::int64_t n_max = ns.back();
  std::vector<std::vector<std::int64_t>> counts(static_cast<std::size_t>(cfg.replicas));
  parallel_for(counts.size(), cfg.workers, [&](std::size_t r) {
    const RangeState a = simulate_path(law, n_max, StreamId{cfg.seed, stream_tag(StreamPurpose::kIntersectA, r), 0});
    const RangeState b = simulate_path(law, n_max, StreamId{cfg.seed, stream_tag(StreamPurpose::kIntersectB, r), 0});
    counts[r] = intersection_profile(a, b, ns);
  });
  std::vector<IntersectionPoint> out;
  const auto m = static_cast<double>(counts.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    double s = 0.0, s2 = 0.0;
    for (const auto& c : counts) {
      const auto v = static_cast<double>(c[i]);
      s += v;
      s2 += v * v;
    }
    IntersectionPoint p;
    p.n = ns[i];
    p.mean = s / m;
    p.std_error = std::sqrt(std::max(0.0, (s2 - m * p.mean * p.mean) / (m - 1.0)) / m);
    out.push_back(p);
  }
  return out;
}

Status command_walk_sim(const RunConfig& cfg, const std::string& out, LogFn log) {
  check_regime(cfg, Experiment::kWalk);
  const auto samples = simulate_replicas(cfg, cfg.replicas, StreamPurpose::kWalk, false);
  write_file(out, samples_csv(samples));
  emit(log, "walk sim: " + std::to_string(samples.size()) + " replicas, n = " + std::to_string(cfg.n) + " -> " + out);
  return Status::kPass;
}

Status command_green_table(const RunConfig& cfg, const std::string& out, LogFn log) {
  check_regime(cfg, Experiment::kGreen);
  const StepLaw law = cfg.law.build();
  const auto q = make_green(law, cfg, cfg.green_radius);
  const GreenTable table = tabulate(*q, cfg.green_radius);
  ojson j;
  j["law"] = law_json(cfg.law);
  j["law_fingerprint"] = law.fingerprint();
  j["method"] = to_string(table.method());
  j["radius"] = cfg.green_radius;
  j["tol"] = cfg.green_tol;
  j["note"] = "entries are canonical displacements (sorted absolute coordinates); G is invariant under "
              "coordinate permutations and sign changes";
  ojson entries = ojson::array();
  for (const auto& [x, v] : table.entries()) {
    entries.push_back({{"x", point_json(x)}, {"value", v.value}, {"error", v.error}});
  }
  j["entries"] = entries;
  Status status = Status::kPass;
  if (cfg.oracle_horizon > 0) {
    const GreenTable oracle = convolution_green_oracle(law, cfg.green_radius, cfg.oracle_horizon);
    double worst = 0.0;
    std::int64_t bad = 0;
    for (const auto& [x, o] : oracle.entries()) {
      const GreenValue v = table.evaluate(x);
      const double ratio = std::abs(v.value - o.value) / (v.error + o.error);
      worst = std::max(worst, ratio);
      if (ratio > 1.0) ++bad;
    }
    j["oracle"] = {{"horizon", cfg.oracle_horizon}, {"worst_ratio", worst}, {"disagreements", bad}};
    if (bad > 0) status = Status::kFail;
    emit(log, "green table: oracle cross-check worst |diff|/(err_q + err_o) = " + format_double(worst) +
                  ", disagreements " + std::to_string(bad));
  }
  write_file(out, dump(j));
  emit(log, "green table: " + std::to_string(table.entries().size()) + " canonical entries -> " + out);
  return status;
}

std::vector<LatticePoint> parse_point_set(const std::string& json_text) {
  ojson j;
  try {
    j = ojson::parse(json_text);
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("point set is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::kConfigInvalid, "point set must be a list of coordinate arrays");
  std::vector<LatticePoint> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.empty()) throw Error(ErrorCode::kConfigInvalid, "each point must be a coordinate array");
    std::vector<std::int64_t> c;
    for (const auto& v : p) {
      if (!v.is_number_integer()) throw Error(ErrorCode::kConfigInvalid, "coordinates must be integers");
      c.push_back(v.get<std::int64_t>());
    }
    if (!pts.empty() && static_cast<int>(c.size()) != pts.front().dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "points of different dimensions");
    }
    pts.emplace_back(std::span<const std::int64_t>(c));
  }
  return pts;
}

Status command_capacity_exact(const RunConfig& cfg, const std::string& set_path, const std::string& out, LogFn log) {
  check_regime(cfg, Experiment::kCapacityExact);
  const StepLaw law = cfg.law.build();
  const auto pts = parse_point_set(read_file(set_path));
  std::int64_t radius = 0;
  for (const auto& x : pts) {
    if (x.dim() != law.dim()) throw Error(ErrorCode::kDimensionMismatch, "point set and law differ in d");
    for (const auto& y : pts) radius = std::max(radius, (y - x).chebyshev_norm());
  }
  const auto q = make_green(law, cfg, std::max<std::int64_t>(radius, 1));
  const CapacityEstimate c = equilibrium_capacity(pts, *q);
  ojson j;
  j["law"] = law_json(cfg.law);
  j["method"] = to_string(c.method);
  j["green_tol"] = cfg.green_tol;
  j["set_size"] = c.set_size;
  j["value"] = c.value;
  j["error_bound"] = c.error_bound;
  j["condition"] = c.condition;
  std::vector<LatticePoint> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  ojson eq = ojson::array();
  for (std::size_t i = 0; i < sorted.size(); ++i) eq.push_back({{"x", point_json(sorted[i])}, {"e", c.equilibrium[i]}});
  j["equilibrium"] = eq;
  if (out.empty()) {
    emit(log, dump(j));
  } else {
    write_file(out, dump(j));
    emit(log, "capacity exact: Cap = " + format_double(c.value) + " +- " + format_double(c.error_bound) + " -> " + out);
  }
  return Status::kPass;
}

Status command_capacity_walk(const RunConfig& cfg, const std::string& out, LogFn log) {
  check_regime(cfg, Experiment::kCapacityWalk);
  std::unique_ptr<QuadratureGreen> green;
  if (cfg.estimator == CapacityMethod::kEquilibriumSolve) green = make_green(cfg.law.build(), cfg, cfg.green_radius);
  const auto samples = simulate_replicas(cfg, cfg.replicas, StreamPurpose::kWalk, true, green.get());
  write_file(out, samples_csv(samples));
  emit(log, "capacity walk (" + to_string(cfg.estimator) + "): " + std::to_string(samples.size()) + " replicas -> " +
                out);
  return Status::kPass;
}

Status command_intersections(const RunConfig& cfg, const std::string& out, const std::string& report, LogFn log) {
  const auto pts = intersection_means(cfg);
  ScalingSpec spec;
  spec.d = cfg.law.d;
  spec.alpha = cfg.law.alpha;
  std::string csv = "n,mean,std_error,F_d\n";
  for (const auto& p : pts) {
    csv += std::to_string(p.n) + "," + format_double(p.mean) + "," + format_double(p.std_error) + ",";
    try {
      if (p.n >= 1) csv += format_double(F_d(p.n, spec));
    } catch (const Error&) {
    }
    csv += "\n";
  }
  if (!out.empty()) write_file(out, csv);
  std::vector<std::pair<double, double>> pairs;
  for (const auto& p : pts) {
    if (p.n >= 1) pairs.emplace_back(static_cast<double>(p.n), p.mean);
  }
  Status status = Status::kPass;
  if (pairs.size() >= 3) {
    const GrowthFit fit = growth_exponent(pairs);
    const double limit = cfg.tolerance("growth_exponent_max");
    TestReport r;
    r.name = "intersection_growth";
    r.sample_size = static_cast<std::size_t>(cfg.replicas);
    r.add("slope", fit.slope);
    r.verdicts.push_back({"growth_exponent_below", fit.slope < limit, fit.slope, limit, "growth_exponent_max"});
    if (!r.passed()) status = Status::kFail;
    emit(log, "intersections: growth exponent of E[I_n] = " + format_double(fit.slope));
    if (!report.empty()) {
      ojson j;
      j["experiment"] = "intersections";
      j["config"] = ojson::parse(cfg.to_json());
      j["fit"] = fit_to_json(fit);
      j["report"] = report_to_json(r);
      write_file(report, dump(j));
    }
  }
  return status;
}

Status command_fclt(const RunConfig& cfg, bool capacity, const std::string& out, const std::string& report,
                    LogFn log) {
  const FcltRun run = run_fclt(cfg, capacity);
  if (!out.empty()) write_file(out, samples_csv(run.samples));
  if (!report.empty()) write_file(report, fclt_report_json(cfg, run.analysis));
  const FcltAnalysis& a = run.analysis;
  auto line = [&](const TestReport& r) { emit(log, (r.passed() ? "  PASS " : "  FAIL ") + r.name); };
  emit(log, std::string("fclt ") + (capacity ? "cap" : "range") + ": sigma_hat = " + format_double(a.sigma_hat) +
                ", variance slope = " + format_double(a.variance_fit.slope));
  line(a.variance_linearity);
  line(a.normality_t1);
  line(a.fdd_covariance);
  for (const auto& r : a.cramer_wold) line(r);
  for (const auto& r : a.condition_ii) line(r);
  return a.passed() ? Status::kPass : Status::kFail;
}

}  // namespace stablewalk
