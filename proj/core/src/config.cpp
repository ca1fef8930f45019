#include "stablewalk/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stablewalk/error.hpp"

namespace stablewalk {
namespace {

using nlohmann::json;

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"ks_alpha", 0.01},
      {"max_abs_skewness", 0.15},
      {"max_abs_excess_kurtosis", 0.35},
      {"covariance_rel_tol", 0.15},
      {"condition_ii_ceiling", 0.1},
      {"variance_slope_min", 0.85},
      {"variance_slope_max", 1.15},
      {"growth_exponent_max", 0.40},
  };
  return t;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) invalid("unknown key '" + k + "' in " + where);
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(where + "." + key + ": " + e.what());
  }
}

template <class T>
void maybe(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

std::vector<double> parse_grid(const json& g) {
  if (g.is_object()) {
    check_keys(g, {"uniform_steps"}, "t_grid");
    const auto k = get<std::int64_t>(g, "uniform_steps", "t_grid");
    if (k < 1 || k > 100000) invalid("t_grid.uniform_steps must be in [1, 100000]");
    std::vector<double> t;
    for (std::int64_t j = 0; j <= k; ++j) {
      // Floors are exact only when j / k is a terminating decimal.
      t.push_back(static_cast<double>(j) / static_cast<double>(k));
    }
    return t;
  }
  if (!g.is_array()) invalid("t_grid must be a list of times or {\"uniform_steps\": k}");
  return g.get<std::vector<double>>();
}

StopRule parse_stop_rule(const json& j) {
  check_keys(j, {"kind", "time", "level", "cap"}, "stop_rules[]");
  StopRule r;
  const auto kind = get<std::string>(j, "kind", "stop_rules[]");
  if (kind == "fixed-time") {
    r.kind = StopRule::Kind::kFixedTime;
    r.time = get<double>(j, "time", "stop_rules[]");
  } else if (kind == "first-passage") {
    r.kind = StopRule::Kind::kFirstPassage;
    r.level = get<double>(j, "level", "stop_rules[]");
    r.cap = get<double>(j, "cap", "stop_rules[]");
  } else {
    invalid("stop rule kind must be fixed-time or first-passage");
  }
  return r;
}

json stop_rule_json(const StopRule& r) {
  if (r.kind == StopRule::Kind::kFixedTime) return {{"kind", "fixed-time"}, {"time", r.time}};
  return {{"kind", "first-passage"}, {"level", r.level}, {"cap", r.cap}};
}

}  // namespace

double RunConfig::tolerance(const std::string& name) const {
  const auto it = tolerances.find(name);
  if (it == tolerances.end()) invalid("tolerance '" + name + "' missing from the tolerance block");
  return it->second;
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    invalid(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.empty()) invalid("configuration is empty");
  check_keys(j,
             {"law", "n", "n_values", "t_grid", "replicas", "centering_replicas", "seed", "workers", "estimator",
              "green", "fclt", "tolerances", "outputs", "description"},
             "config");
  if (!j.contains("law")) invalid("missing law block");
  RunConfig c;
  const json& law = j.at("law");
  check_keys(law, {"d", "alpha", "loop_prob", "family"}, "law");
  c.law.d = get<int>(law, "d", "law");
  c.law.alpha = get<double>(law, "alpha", "law");
  c.law.loop_prob = get<double>(law, "loop_prob", "law");
  try {
    c.law.family = law_family_from_string(get<std::string>(law, "family", "law"));
  } catch (const Error& e) {
    invalid(e.what());
  }

  maybe(j, "n", c.n, "config");
  maybe(j, "n_values", c.n_values, "config");
  if (j.contains("t_grid")) c.t_grid = parse_grid(j.at("t_grid"));
  maybe(j, "replicas", c.replicas, "config");
  maybe(j, "centering_replicas", c.centering_replicas, "config");
  maybe(j, "seed", c.seed, "config");
  maybe(j, "workers", c.workers, "config");

  if (j.contains("estimator")) {
    const json& e = j.at("estimator");
    check_keys(e, {"capacity", "escape_horizon"}, "estimator");
    if (e.contains("capacity")) {
      try {
        c.estimator = capacity_method_from_string(get<std::string>(e, "capacity", "estimator"));
      } catch (const Error& err) {
        invalid(err.what());
      }
    }
    maybe(e, "escape_horizon", c.escape_horizon, "estimator");
  }
  if (j.contains("green")) {
    const json& g = j.at("green");
    check_keys(g, {"radius", "tol", "oracle_horizon"}, "green");
    maybe(g, "radius", c.green_radius, "green");
    maybe(g, "tol", c.green_tol, "green");
    maybe(g, "oracle_horizon", c.oracle_horizon, "green");
  }
  if (j.contains("fclt")) {
    const json& f = j.at("fclt");
    check_keys(f, {"fdd_grid", "projections", "stop_rules", "h_values", "epsilon", "bootstrap"}, "fclt");
    maybe(f, "fdd_grid", c.fdd_grid, "fclt");
    maybe(f, "projections", c.projections, "fclt");
    if (f.contains("stop_rules")) {
      for (const auto& r : f.at("stop_rules")) c.stop_rules.push_back(parse_stop_rule(r));
    }
    maybe(f, "h_values", c.h_values, "fclt");
    maybe(f, "epsilon", c.epsilon, "fclt");
    maybe(f, "bootstrap", c.bootstrap, "fclt");
  }
  if (c.stop_rules.empty()) {
    c.stop_rules.push_back({StopRule::Kind::kFixedTime, 0.5, 0.5, 0.9});
    c.stop_rules.push_back({StopRule::Kind::kFirstPassage, 0.5, 0.5, 0.9});
  }
  c.tolerances = default_tolerances();
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) invalid("tolerances must be an object");
    for (const auto& [k, v] : t.items()) {
      if (!default_tolerances().count(k)) invalid("unknown tolerance '" + k + "'");
      if (!v.is_number()) invalid("tolerance '" + k + "' must be a number");
      c.tolerances[k] = v.get<double>();
    }
  }
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    check_keys(o, {"samples", "report"}, "outputs");
    maybe(o, "samples", c.samples_path, "outputs");
    maybe(o, "report", c.report_path, "outputs");
  }

  if (c.n < 1) invalid("n must be >= 1");
  if (c.n_values.empty()) {
    for (std::int64_t v = 256; v <= c.n; v *= 2) c.n_values.push_back(v);
    if (c.n_values.empty() || c.n_values.back() != c.n) c.n_values.push_back(c.n);
  }
  for (auto v : c.n_values) {
    if (v < 0) invalid("n_values must be >= 0");
  }
  if (c.replicas < 1) invalid("replicas must be >= 1");
  if (c.centering_replicas < 0) invalid("centering_replicas must be >= 0");
  if (c.workers < 1) invalid("workers must be >= 1");
  if (c.escape_horizon < 1) invalid("escape_horizon must be >= 1");
  if (c.green_radius < 0) invalid("green.radius must be >= 0");
  if (!(c.green_tol > 0.0)) invalid("green.tol must be positive");
  if (c.bootstrap < 1) invalid("fclt.bootstrap must be >= 1");
  for (const auto& p : c.projections) {
    if (p.size() != c.fdd_grid.size()) invalid("every projection needs one coefficient per fdd_grid time");
  }
  try {
    TimeGrid::from_decimals(c.t_grid);
  } catch (const Error& e) {
    invalid(std::string("t_grid: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_file(path)); }

std::string RunConfig::to_json() const {
  json j;
  j["law"] = {{"d", law.d}, {"alpha", law.alpha}, {"loop_prob", law.loop_prob}, {"family", to_string(law.family)}};
  j["n"] = n;
  j["n_values"] = n_values;
  j["t_grid"] = t_grid;
  j["replicas"] = replicas;
  j["centering_replicas"] = centering_replicas;
  j["seed"] = seed;
  j["estimator"] = {{"capacity", to_string(estimator)}, {"escape_horizon", escape_horizon}};
  j["green"] = {{"radius", green_radius}, {"tol", green_tol}, {"oracle_horizon", oracle_horizon}};
  json rules = json::array();
  for (const auto& r : stop_rules) rules.push_back(stop_rule_json(r));
  j["fclt"] = {{"fdd_grid", fdd_grid},   {"projections", projections}, {"stop_rules", rules},
               {"h_values", h_values},   {"epsilon", epsilon},         {"bootstrap", bootstrap}};
  j["tolerances"] = tolerances;
  return j.dump(2);
}

void check_regime(const RunConfig& cfg, Experiment e) {
  const StepLaw law = cfg.law.build();
  if (!check_aperiodicity(law)) {
    throw Error(ErrorCode::kRegimeViolation, "aperiodicity fails: support does not generate Z^d");
  }
  const double ratio = cfg.law.d / cfg.law.alpha;
  const TransienceClass tc = transience_class(cfg.law.d, cfg.law.alpha);
  const auto need_transient = [&](const std::string& what) {
    if (tc == TransienceClass::kNotImplied) {
      throw Error(ErrorCode::kRegimeViolation, what + " needs a transient law (d > alpha)");
    }
  };
  switch (e) {
    case Experiment::kWalk:
    case Experiment::kIntersections:
      break;
    case Experiment::kGreen:
    case Experiment::kCapacityExact:
    case Experiment::kCapacityWalk:
      need_transient("Green and capacity computations");
      break;
    case Experiment::kFcltCapacity:
      if (!(ratio > 2.5)) {
        throw Error(ErrorCode::kRegimeViolation,
                    "capacity FCLT needs d/alpha > 5/2, got " + format_double(ratio));
      }
      if (tc != TransienceClass::kStronglyTransient) {
        throw Error(ErrorCode::kRegimeViolation, "capacity FCLT needs strong transience (d > 2 alpha)");
      }
      break;
    case Experiment::kFcltRange:
      if (!(ratio > 1.5)) {
        throw Error(ErrorCode::kRegimeViolation, "range FCLT needs d/alpha > 3/2, got " + format_double(ratio));
      }
      break;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace stablewalk
