#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stablewalk/capacity.hpp"
#include "stablewalk/stats.hpp"
#include "stablewalk/step_law.hpp"

namespace stablewalk {

struct LawSpec {
  int d = 2;
  double alpha = 0.7;
  double loop_prob = 0.25;
  LawFamily family = LawFamily::kAxialPowerLaw;

  StepLaw build() const { return build_step_law(d, alpha, loop_prob, family); }
};

/// One experiment described by a JSON document. Only "law" is mandatory; every
/// other key has the default listed in README.md and is echoed into reports.
struct RunConfig {
  LawSpec law;
  std::int64_t n = 4096;
  std::vector<std::int64_t> n_values;  // defaults to powers of two up to n
  std::vector<double> t_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::int64_t replicas = 2000;
  std::int64_t centering_replicas = 2000;
  std::uint64_t seed = 1;
  int workers = 1;

  CapacityMethod estimator = CapacityMethod::kMcEscape;
  std::int64_t escape_horizon = 256;
  std::int64_t green_radius = 8;
  double green_tol = 1e-6;
  std::int64_t oracle_horizon = 0;  // 0: quadrature only

  std::vector<double> fdd_grid{0.25, 0.5, 0.75, 1.0};
  std::vector<std::vector<double>> projections{{1, 1, 1, 1}, {-1, 1, 0, 0}, {0.5, -1, 0, 1}};
  std::vector<StopRule> stop_rules;
  std::vector<double> h_values{0.1, 0.05, 0.025, 0.0125};
  double epsilon = 0.5;
  int bootstrap = 500;

  std::map<std::string, double> tolerances;

  std::string samples_path;
  std::string report_path;

  /// Named tolerance; throws config-invalid when the block lacks it.
  double tolerance(const std::string& name) const;
  /// Canonical JSON text of the effective configuration.
  std::string to_json() const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

enum class Experiment { kWalk, kGreen, kCapacityExact, kCapacityWalk, kIntersections, kFcltCapacity, kFcltRange };

/// Checks the hypotheses the experiment relies on and throws regime-violation
/// naming the failed one: aperiodicity always; transience for Green and
/// capacity work; strong transience and d/alpha > 5/2 for the capacity FCLT;
/// d/alpha > 3/2 for the range FCLT.
void check_regime(const RunConfig& cfg, Experiment e);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

}  // namespace stablewalk
