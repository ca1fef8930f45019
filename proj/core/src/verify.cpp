#include "stablewalk/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>
#include <unistd.h>

#include "json.hpp"
#include "report_json.hpp"
#include "stablewalk/capacity.hpp"
#include "stablewalk/error.hpp"
#include "stablewalk/green.hpp"
#include "stablewalk/parallel.hpp"
#include "stablewalk/scaling.hpp"

namespace stablewalk {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); }

const json& section(const json& root, const char* key) {
  if (!root.contains(key) || !root.at(key).is_object()) invalid(std::string("verify config lacks section '") + key + "'");
  return root.at(key);
}

template <class T>
T need(const json& j, const char* key) {
  if (!j.contains(key)) invalid(std::string("verify config lacks '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(std::string(key) + ": " + e.what());
  }
}

LawSpec law_of(const json& j) {
  json wrapper = {{"law", j}};
  return parse_run_config(wrapper.dump()).law;
}

StepLaw build_law(const json& j) { return law_of(j).build(); }

// Sub-seed for (criterion, part): independent streams under one master seed.
std::uint64_t derive_seed(std::uint64_t master, int criterion, int part) {
  StreamRng rng(StreamId{master, stream_tag(StreamPurpose::kSynthetic, static_cast<std::uint64_t>(criterion)),
                         static_cast<std::uint64_t>(part)});
  return rng();
}

struct Context {
  json root;
  std::uint64_t seed = 0;
  int workers = 1;
};

RunConfig sub_config(const Context& ctx, const char* key) {
  json j = section(ctx.root, key);
  j["seed"] = ctx.seed;
  j["workers"] = ctx.workers;
  return parse_run_config(j.dump());
}

void detail(CriterionResult& r, std::string name, double v) { r.details.push_back({std::move(name), v}); }

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

QuadratureGreen make_quadrature(const StepLaw& law, std::int64_t radius, double tol) {
  QuadratureOptions o;
  o.tol = tol;
  return QuadratureGreen(law, radius, o);
}

// 1. Quadrature and convolution oracle agree within the sum of their bounds.
void green_cross_validation(const Context& ctx, CriterionResult& r) {
  const json& s = section(ctx.root, "green_cross_validation");
  const auto radius = need<std::int64_t>(s, "radius");
  const auto tol = need<double>(s, "tol");
  const auto max_seconds = need<double>(s, "max_seconds");
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string summary;
  for (const auto& c : need<json>(s, "cases")) {
    const StepLaw law = build_law(need<json>(c, "law"));
    const auto horizon = need<std::int64_t>(c, "oracle_horizon");
    const QuadratureGreen q = make_quadrature(law, radius, tol);
    const GreenTable oracle = convolution_green_oracle(law, radius, horizon);
    double worst = 0.0;
    std::int64_t bad = 0;
    for (const auto& [x, o] : oracle.entries()) {
      const GreenValue v = q.evaluate(x);
      const double ratio = std::abs(v.value - o.value) / (v.error + o.error);
      worst = std::max(worst, ratio);
      if (!(ratio <= 1.0)) ++bad;
    }
    const std::string tag = "d=" + std::to_string(law.dim()) + ",alpha=" + fmt(law.alpha());
    detail(r, tag + " classes", static_cast<double>(oracle.entries().size()));
    detail(r, tag + " worst_ratio", worst);
    detail(r, tag + " disagreements", static_cast<double>(bad));
    detail(r, tag + " G(0,0)", q.evaluate(LatticePoint::origin(law.dim())).value);
    ok = ok && bad == 0;
    summary += (summary.empty() ? "" : "; ") + tag + ": " + std::to_string(oracle.entries().size()) +
               " displacement classes, worst |diff|/bound " + fmt(worst);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail(r, "seconds", secs);
  const bool fast = secs < max_seconds;
  r.status = ok && fast ? Status::kPass : Status::kFail;
  r.summary = summary + "; " + fmt(secs) + " s (limit " + fmt(max_seconds) + " s)";
}

std::vector<LatticePoint> random_set(StreamRng& rng, int d, std::int64_t max_size, std::int64_t radius) {
  const std::int64_t size = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_size)));
  std::vector<LatticePoint> a;
  for (std::int64_t i = 0; i < size; ++i) {
    LatticePoint p(d);
    for (int k = 0; k < d; ++k) p[k] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * radius + 1))) - radius;
    a.push_back(p);
  }
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// 2. mc-escape against the equilibrium solve on random sets.
void capacity_oracle(const Context& ctx, CriterionResult& r) {
  const json& s = section(ctx.root, "capacity_oracle");
  const StepLaw law = build_law(need<json>(s, "law"));
  const auto sets = need<std::int64_t>(s, "sets");
  const auto max_size = need<std::int64_t>(s, "max_size");
  const auto radius = need<std::int64_t>(s, "radius");
  const auto z = need<double>(s, "z");
  const auto min_agree = need<std::int64_t>(s, "min_agree");
  const auto tol = need<double>(s, "green_tol");
  const auto singleton_factor = need<double>(s, "singleton_green_factor");
  EscapeOptions eo;
  eo.horizon = need<std::int64_t>(s, "horizon");
  eo.trials_per_point = need<std::int64_t>(s, "trials_per_point");
  eo.workers = ctx.workers;
  const QuadratureGreen q = make_quadrature(law, 2 * radius, tol);
  std::int64_t agree = 0;
  double worst_z = 0.0;
  for (std::int64_t i = 0; i < sets; ++i) {
    StreamRng rng(StreamId{ctx.seed, stream_tag(StreamPurpose::kRandomSet, static_cast<std::uint64_t>(i)), 2});
    const auto a = random_set(rng, law.dim(), max_size, radius);
    const CapacityEstimate exact = equilibrium_capacity(a, q);
    const CapacityEstimate mc = mc_escape_capacity(a, law, derive_seed(ctx.seed, 2, static_cast<int>(i)), eo);
    const double se = std::sqrt(mc.std_error * mc.std_error + exact.error_bound * exact.error_bound);
    const double zi = std::abs(mc.value - exact.value) / se;
    worst_z = std::max(worst_z, zi);
    if (zi <= z) ++agree;
  }
  const LatticePoint o = LatticePoint::origin(law.dim());
  const double g0 = q.evaluate(o).value;
  const CapacityEstimate single = mc_escape_capacity({o}, law, derive_seed(ctx.seed, 2, -1), eo);
  const double single_gap = std::abs(single.value - 1.0 / g0);
  const double single_allow = z * single.std_error + singleton_factor * tol;
  detail(r, "sets", static_cast<double>(sets));
  detail(r, "agreeing_sets", static_cast<double>(agree));
  detail(r, "worst_z", worst_z);
  detail(r, "cap0_mc", single.value);
  detail(r, "cap0_mc_se", single.std_error);
  detail(r, "one_over_G00", 1.0 / g0);
  detail(r, "cap0_gap", single_gap);
  detail(r, "cap0_allowed", single_allow);
  const bool ok = agree >= min_agree && single_gap <= single_allow;
  r.status = ok ? Status::kPass : Status::kFail;
  r.summary = std::to_string(agree) + "/" + std::to_string(sets) + " sets within " + fmt(z) + " SE (need " +
              std::to_string(min_agree) + "), worst " + fmt(worst_z) + " SE; Cap({0}) mc " + fmt(single.value, 6) +
              " vs 1/G(0,0) " + fmt(1.0 / g0, 6) + " (gap " + fmt(single_gap) + " <= " + fmt(single_allow) + ")";
}

// 3. Pathwise identities with zero tolerance.
void structural(const Context& ctx, CriterionResult& r) {
  const json& s = section(ctx.root, "structural");
  const StepLaw law = build_law(need<json>(s, "law"));
  const auto paths = need<std::int64_t>(s, "paths");
  const auto m = need<std::int64_t>(s, "m");
  const auto n = need<std::int64_t>(s, "n");
  const std::uint64_t seed_a = derive_seed(ctx.seed, 3, 0);
  std::vector<char> identity_ok(static_cast<std::size_t>(paths), 0), step_ok(static_cast<std::size_t>(paths), 0);
  parallel_for(identity_ok.size(), ctx.workers, [&](std::size_t i) {
    const RangeState p = simulate_path(law, m + n, walk_stream(seed_a, i), true);
    identity_ok[i] = decompose_range(p, m, n).identity_holds();
    SiteSet seen(law.dim(), static_cast<std::size_t>(m + n + 1));
    std::size_t prev = 0;
    bool ok = true;
    for (std::size_t k = 0; k < p.path_log().size(); ++k) {
      seen.insert(p.path_log()[k], static_cast<std::int64_t>(k));
      if (k > 0 && seen.size() > prev + 1) ok = false;
      prev = seen.size();
    }
    step_ok[i] = ok && prev == p.cardinality();
  });
  const auto id_pass = std::count(identity_ok.begin(), identity_ok.end(), 1);
  const auto step_pass = std::count(step_ok.begin(), step_ok.end(), 1);

  const StepLaw claw = build_law(need<json>(s, "capacity_law"));
  const auto cpaths = need<std::int64_t>(s, "capacity_paths");
  const auto cn = need<std::int64_t>(s, "capacity_n");
  const QuadratureGreen q = make_quadrature(claw, cn, need<double>(s, "green_tol"));
  const std::uint64_t seed_c = derive_seed(ctx.seed, 3, 1);
  std::int64_t mono_bad = 0, lip_bad = 0, range_bad = 0;
  double max_increment = 0.0, max_error = 0.0;
  for (std::int64_t i = 0; i < cpaths; ++i) {
    const RangeState p = simulate_path(claw, cn, walk_stream(seed_c, static_cast<std::uint64_t>(i)), true);
    const PrefixCapacities c = path_capacities(p, q);
    SiteSet seen(claw.dim(), static_cast<std::size_t>(cn + 1));
    std::size_t prev = 0;
    for (std::size_t k = 0; k < p.path_log().size(); ++k) {
      seen.insert(p.path_log()[k], static_cast<std::int64_t>(k));
      if (k > 0 && seen.size() > prev + 1) ++range_bad;
      prev = seen.size();
    }
    for (std::size_t k = 0; k + 1 < c.values.size(); ++k) {
      const double inc = c.values[k + 1] - c.values[k];
      max_increment = std::max(max_increment, inc);
      max_error = std::max(max_error, c.errors[k + 1]);
      if (c.values[k + 1] < c.values[k]) ++mono_bad;
      if (inc > 1.0 + c.errors[k] + c.errors[k + 1]) ++lip_bad;
    }
  }
  detail(r, "decomposition_paths", static_cast<double>(paths));
  detail(r, "decomposition_identity_failures", static_cast<double>(paths - id_pass));
  detail(r, "range_step_failures", static_cast<double>(paths - step_pass + range_bad));
  detail(r, "capacity_paths", static_cast<double>(cpaths));
  detail(r, "capacity_monotonicity_failures", static_cast<double>(mono_bad));
  detail(r, "capacity_lipschitz_failures", static_cast<double>(lip_bad));
  detail(r, "max_capacity_increment", max_increment);
  detail(r, "max_solver_error", max_error);
  const bool ok = id_pass == paths && step_pass == paths && range_bad == 0 && mono_bad == 0 && lip_bad == 0;
  r.status = ok ? Status::kPass : Status::kFail;
  r.summary = "decomposition identity " + std::to_string(id_pass) + "/" + std::to_string(paths) +
              ", |R_{k+1}| <= |R_k| + 1 on all steps " + (step_pass == paths && range_bad == 0 ? "yes" : "NO") +
              "; exact C_k on " + std::to_string(cpaths) + " paths (d=" + std::to_string(claw.dim()) +
              "): monotonicity failures " + std::to_string(mono_bad) + ", +1 bound failures " +
              std::to_string(lip_bad) + ", max increment " + fmt(max_increment, 4);
}

// 4. Subadditivity and the 2 G(A, B) lower bound on random set pairs.
void decomposition(const Context& ctx, CriterionResult& r) {
  const json& s = section(ctx.root, "decomposition");
  const StepLaw law = build_law(need<json>(s, "law"));
  const auto pairs = need<std::int64_t>(s, "pairs");
  const auto max_size = need<std::int64_t>(s, "max_size");
  const auto radius = need<std::int64_t>(s, "radius");
  const QuadratureGreen q = make_quadrature(law, 2 * radius, need<double>(s, "green_tol"));
  std::int64_t upper_ok = 0, lower_ok = 0;
  double min_upper = INFINITY, min_lower = INFINITY;
  for (std::int64_t i = 0; i < pairs; ++i) {
    StreamRng rng(StreamId{ctx.seed, stream_tag(StreamPurpose::kRandomSet, static_cast<std::uint64_t>(i)), 4});
    const auto a = random_set(rng, law.dim(), max_size, radius);
    const auto b = random_set(rng, law.dim(), max_size, radius);
    const DecompositionReport d = decomposition_bounds_check(a, b, q);
    upper_ok += d.subadditive;
    lower_ok += d.lower_bound;
    min_upper = std::min(min_upper, d.upper_slack);
    min_lower = std::min(min_lower, d.lower_slack);
  }
  detail(r, "pairs", static_cast<double>(pairs));
  detail(r, "subadditive_ok", static_cast<double>(upper_ok));
  detail(r, "lower_bound_ok", static_cast<double>(lower_ok));
  detail(r, "min_upper_slack", min_upper);
  detail(r, "min_lower_slack", min_lower);
  r.status = upper_ok == pairs && lower_ok == pairs ? Status::kPass : Status::kFail;
  r.summary = "subadditivity " + std::to_string(upper_ok) + "/" + std::to_string(pairs) + ", lower bound " +
              std::to_string(lower_ok) + "/" + std::to_string(pairs) + " (min slacks " + fmt(min_upper) + ", " +
              fmt(min_lower) + ")";
}

struct FcltPair {
  std::optional<FcltRun> cap, range;
  std::optional<Error> cap_error, range_error;
};

FcltPair run_fclt_pair(const Context& ctx) {
  FcltPair p;
  try {
    p.cap = run_fclt(sub_config(ctx, "fclt_capacity"), true);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    p.cap_error = e;
  }
  try {
    p.range = run_fclt(sub_config(ctx, "fclt_range"), false);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    p.range_error = e;
  }
  return p;
}

// Runs `body` on each available analysis; an unavailable one makes the
// criterion inconclusive or failed according to its error.
template <class Body>
void on_fclt(const FcltPair& f, bool use_range, CriterionResult& r, Body&& body) {
  Status st = Status::kPass;
  std::string summary;
  auto one = [&](const std::optional<FcltRun>& run, const std::optional<Error>& err, const char* label) {
    if (!run) {
      st = combine(st, status_of(*err));
      summary += std::string(summary.empty() ? "" : "; ") + label + ": " + err->what();
      return;
    }
    std::string part;
    const bool ok = body(run->analysis, label, part);
    if (!ok) st = combine(st, Status::kFail);
    summary += std::string(summary.empty() ? "" : "; ") + label + ": " + part;
  };
  one(f.cap, f.cap_error, "capacity");
  if (use_range) one(f.range, f.range_error, "range");
  r.status = st;
  r.summary = summary;
}

std::string normality_summary(const TestReport& t) {
  return "KS p " + fmt(t.stat("ks_p_value")) + ", skew " + fmt(t.stat("skewness"), 2) + ", exkurt " +
         fmt(t.stat("excess_kurtosis"), 2);
}

// 8. Growth exponents of E[G(R_n, R~_n)] and E[I_n].
void error_scaling(const Context& ctx, CriterionResult& r) {
  const json& s = section(ctx.root, "error_scaling");
  const json& cg = need<json>(s, "cross_green");
  const StepLaw law = build_law(need<json>(cg, "law"));
  const auto limit = need<double>(s, "max_exponent");
  CrossGreenOptions co;
  co.workers = ctx.workers;
  co.near_radius = need<std::int64_t>(cg, "near_radius");
  const auto ns = need<std::vector<std::int64_t>>(cg, "n_values");
  if (ns.empty()) invalid("cross_green.n_values is empty");
  co.max_n = *std::max_element(ns.begin(), ns.end());
  const QuadratureGreen q = make_quadrature(law, co.near_radius, need<double>(cg, "green_tol"));
  const auto pts = cross_green_estimate(law, q, ns, need<std::int64_t>(cg, "replicas"), derive_seed(ctx.seed, 8, 0), co);
  std::vector<std::pair<double, double>> pairs;
  for (const auto& p : pts) pairs.emplace_back(static_cast<double>(p.n), p.mean);
  const GrowthFit g = growth_exponent(pairs);
  ScalingSpec spec;
  spec.d = law.dim();
  spec.alpha = law.alpha();
  std::vector<std::pair<double, double>> env;
  for (auto n : ns) env.emplace_back(static_cast<double>(n), H_d(n, spec));
  const double theory = growth_exponent(env).slope;

  json ij = section(ctx.root, "error_scaling").at("intersections");
  ij["seed"] = derive_seed(ctx.seed, 8, 1);
  ij["workers"] = ctx.workers;
  const RunConfig icfg = parse_run_config(ij.dump());
  const auto ipts = intersection_means(icfg);
  std::vector<std::pair<double, double>> ipairs;
  for (const auto& p : ipts) ipairs.emplace_back(static_cast<double>(p.n), p.mean);
  const GrowthFit gi = growth_exponent(ipairs);

  detail(r, "cross_green_slope", g.slope);
  detail(r, "cross_green_slope_se", g.std_error);
  detail(r, "H_d_slope", theory);
  for (const auto& p : pts) detail(r, "E[G(R_n,R~_n)]@" + std::to_string(p.n), p.mean);
  detail(r, "intersection_slope", gi.slope);
  detail(r, "intersection_slope_se", gi.std_error);
  for (const auto& p : ipts) detail(r, "E[I_n]@" + std::to_string(p.n), p.mean);
  const bool ok = g.slope < limit && gi.slope < limit;
  r.status = ok ? Status::kPass : Status::kFail;
  r.summary = "cross-Green growth exponent " + fmt(g.slope) + " (H_d envelope " + fmt(theory) + "), E[I_n] exponent " +
              fmt(gi.slope) + ", limit " + fmt(limit);
}

// 10. Every command twice (and once with another worker count) gives
// byte-identical files.
void determinism(const Context& ctx, CriterionResult& r) {
  const json& s = section(ctx.root, "determinism");
  json base = need<json>(s, "config");
  base["seed"] = ctx.seed;
  const int alt_workers = need<int>(s, "alternate_workers");
  const auto set = need<json>(s, "set");
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("stablewalk-determinism-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  write_file((dir / "set.json").string(), set.dump());

  struct Cmd {
    std::string name;
    std::function<void(const RunConfig&, const std::string&)> run;
    int outputs;
  };
  const std::string set_path = (dir / "set.json").string();
  const std::vector<Cmd> cmds{
      {"walk sim", [](const RunConfig& c, const std::string& p) { command_walk_sim(c, p + ".0", nullptr); }, 1},
      {"green table", [](const RunConfig& c, const std::string& p) { command_green_table(c, p + ".0", nullptr); }, 1},
      {"capacity exact",
       [&](const RunConfig& c, const std::string& p) { command_capacity_exact(c, set_path, p + ".0", nullptr); }, 1},
      {"capacity walk", [](const RunConfig& c, const std::string& p) { command_capacity_walk(c, p + ".0", nullptr); },
       1},
      {"intersections",
       [](const RunConfig& c, const std::string& p) { command_intersections(c, p + ".0", p + ".1", nullptr); }, 2},
      {"fclt cap",
       [](const RunConfig& c, const std::string& p) { command_fclt(c, true, p + ".0", p + ".1", nullptr); }, 2},
      {"fclt range",
       [](const RunConfig& c, const std::string& p) { command_fclt(c, false, p + ".0", p + ".1", nullptr); }, 2},
  };
  std::int64_t identical = 0;
  std::string failed;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    std::vector<std::string> texts;
    for (int run = 0; run < 3; ++run) {
      json j = base;
      j["workers"] = run == 2 ? alt_workers : 1;
      const RunConfig cfg = parse_run_config(j.dump());
      const std::string prefix = (dir / ("cmd" + std::to_string(i) + "_run" + std::to_string(run))).string();
      cmds[i].run(cfg, prefix);
      std::string all;
      for (int k = 0; k < cmds[i].outputs; ++k) all += read_file(prefix + "." + std::to_string(k)) + '\x1e';
      texts.push_back(std::move(all));
    }
    const bool same = texts[0] == texts[1] && texts[0] == texts[2];
    identical += same;
    if (!same) failed += (failed.empty() ? "" : ", ") + cmds[i].name;
    detail(r, cmds[i].name + " bytes", static_cast<double>(texts[0].size()));
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  detail(r, "commands", static_cast<double>(cmds.size()));
  detail(r, "identical", static_cast<double>(identical));
  r.status = identical == static_cast<std::int64_t>(cmds.size()) ? Status::kPass : Status::kFail;
  r.summary = std::to_string(identical) + "/" + std::to_string(cmds.size()) +
              " commands byte-identical across reruns and worker counts (1, " + std::to_string(alt_workers) + ")" +
              (failed.empty() ? "" : "; differing: " + failed);
}

}  // namespace

VerifyResult verify_suite(const std::string& json_text, const VerifyOptions& opts) {
  Context ctx;
  try {
    ctx.root = json::parse(json_text);
  } catch (const json::exception& e) {
    invalid(std::string("not valid JSON: ") + e.what());
  }
  if (!ctx.root.is_object() || ctx.root.empty()) invalid("verify config is empty");
  static const std::set<std::string> known{"description", "seed", "workers", "green_cross_validation",
                                           "capacity_oracle", "structural", "decomposition", "fclt_capacity",
                                           "fclt_range", "error_scaling", "determinism"};
  for (const auto& [k, v] : ctx.root.items()) {
    if (!known.count(k)) invalid("unknown key '" + k + "' in verify config");
  }
  ctx.seed = opts.seed ? *opts.seed : need<std::uint64_t>(ctx.root, "seed");
  ctx.workers = opts.workers ? *opts.workers : need<int>(ctx.root, "workers");
  if (ctx.workers < 1) invalid("workers must be >= 1");
  // Validate every section up front so that a bad config fails before any work.
  for (const char* key : {"green_cross_validation", "capacity_oracle", "structural", "decomposition",
                          "error_scaling", "determinism"}) {
    section(ctx.root, key);
  }
  sub_config(ctx, "fclt_capacity");
  sub_config(ctx, "fclt_range");

  auto wanted = [&](int id) { return opts.only.empty() || std::count(opts.only.begin(), opts.only.end(), id); };

  VerifyResult out;
  std::optional<FcltPair> fclt;
  auto fclt_runs = [&]() -> const FcltPair& {
    if (!fclt) fclt = run_fclt_pair(ctx);
    return *fclt;
  };

  using Fn = std::function<void(CriterionResult&)>;
  const std::vector<std::tuple<int, std::string, Fn>> battery{
      {1, "Green cross-validation", [&](CriterionResult& r) { green_cross_validation(ctx, r); }},
      {2, "capacity oracle equivalence", [&](CriterionResult& r) { capacity_oracle(ctx, r); }},
      {3, "exact structural identities", [&](CriterionResult& r) { structural(ctx, r); }},
      {4, "capacity decomposition inequalities", [&](CriterionResult& r) { decomposition(ctx, r); }},
      {5, "variance linearity",
       [&](CriterionResult& r) {
         on_fclt(fclt_runs(), true, r, [&](const FcltAnalysis& a, const std::string& label, std::string& part) {
           detail(r, label + " slope", a.variance_fit.slope);
           detail(r, label + " slope_se", a.variance_fit.std_error);
           part = "slope " + fmt(a.variance_fit.slope) + " +- " + fmt(a.variance_fit.std_error, 2);
           return a.variance_linearity.passed();
         });
       }},
      {6, "one-dimensional Gaussianity",
       [&](CriterionResult& r) {
         on_fclt(fclt_runs(), true, r, [&](const FcltAnalysis& a, const std::string& label, std::string& part) {
           const TestReport& t = a.normality_t1;
           detail(r, label + " ks_p", t.stat("ks_p_value"));
           detail(r, label + " skewness", t.stat("skewness"));
           detail(r, label + " excess_kurtosis", t.stat("excess_kurtosis"));
           part = normality_summary(t);
           return t.passed();
         });
       }},
      {7, "finite-dimensional structure",
       [&](CriterionResult& r) {
         on_fclt(fclt_runs(), true, r, [&](const FcltAnalysis& a, const std::string& label, std::string& part) {
           bool ok = a.fdd_covariance.passed();
           const double worst = a.fdd_covariance.stat("worst_relative_deviation");
           detail(r, label + " covariance worst_rel_dev", worst);
           int cw_ok = 0;
           std::string cw_failed;
           for (const auto& t : a.cramer_wold) {
             if (!t.passed()) {
               cw_failed += (cw_failed.empty() ? " (failing: " : ", ") + t.name.substr(t.name.find('[')) + " KS p " +
                            fmt(t.stat("ks_p_value"), 2) + ", skew " + fmt(t.stat("skewness"), 2);
             }
             detail(r, label + " " + t.name + " ks_p", t.stat("ks_p_value"));
             detail(r, label + " " + t.name + " skewness", t.stat("skewness"));
             detail(r, label + " " + t.name + " excess_kurtosis", t.stat("excess_kurtosis"));
             cw_ok += t.passed();
             ok = ok && t.passed();
           }
           part = std::string("covariance ") + (a.fdd_covariance.passed() ? "ok" : "OUT OF BAND") +
                  " (worst rel. dev. " + fmt(worst) + "), Cramer-Wold " + std::to_string(cw_ok) + "/" +
                  std::to_string(a.cramer_wold.size()) + (cw_failed.empty() ? "" : cw_failed + ")");
           return ok;
         });
       }},
      {8, "error-term scaling", [&](CriterionResult& r) { error_scaling(ctx, r); }},
      {9, "condition-(ii) proxy",
       [&](CriterionResult& r) {
         on_fclt(fclt_runs(), false, r, [&](const FcltAnalysis& a, const std::string&, std::string& part) {
           bool ok = true;
           for (const auto& t : a.condition_ii) {
             std::string probs;
             for (const auto& st : t.statistics) {
               if (st.name.rfind("p_h=", 0) == 0) {
                 probs += (probs.empty() ? "" : ", ") + fmt(st.value);
                 detail(r, t.name + " " + st.name, st.value);
               }
             }
             part += (part.empty() ? "" : "; ") + t.name.substr(t.name.find(' ') + 1) + " [" + probs + "]" +
                     (t.passed() ? "" : " FAIL");
             ok = ok && t.passed();
           }
           return ok;
         });
       }},
      {10, "determinism", [&](CriterionResult& r) { determinism(ctx, r); }},
  };

  for (const auto& [id, name, fn] : battery) {
    if (!wanted(id)) continue;
    CriterionResult r;
    r.id = id;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      fn(r);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfigInvalid) throw;
      r.status = status_of(e);
      r.summary = e.what();
    } catch (const std::exception& e) {
      r.status = Status::kFail;
      r.summary = std::string("unexpected error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.overall = combine(out.overall, r.status);
    if (opts.on_result) opts.on_result(r);
    out.criteria.push_back(std::move(r));
  }
  return out;
}

std::string format_result_line(const CriterionResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1f s", r.seconds);
  return "[" + to_string(r.status) + "] " + std::to_string(r.id) + " " + r.name + ": " + r.summary + " (" + secs + ")";
}

std::string verify_report_json(const VerifyResult& v) {
  ojson j;
  ojson arr = ojson::array();
  for (const auto& r : v.criteria) {
    ojson d = ojson::object();
    for (const auto& s : r.details) d[s.name] = s.value;
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"status", to_string(r.status)},
                   {"summary", r.summary},
                   {"seconds", r.seconds},
                   {"details", d}});
  }
  j["criteria"] = arr;
  j["overall"] = to_string(v.overall);
  return j.dump(2) + "\n";
}

}  // namespace stablewalk
