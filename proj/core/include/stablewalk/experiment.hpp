#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stablewalk/config.hpp"
#include "stablewalk/green.hpp"
#include "stablewalk/scaling.hpp"
#include "stablewalk/stats.hpp"
#include "stablewalk/walker.hpp"

namespace stablewalk {

/// Exit status shared by every command: 0 pass, 1 fail, 2 inconclusive.
enum class Status { kPass = 0, kFail = 1, kInconclusive = 2 };
std::string to_string(Status s);
Status combine(Status a, Status b);

/// Maps an exception to a status: insufficient-replicas is inconclusive,
/// anything else a failure.
Status status_of(const Error& e);

/// M replicas of the range (and optionally capacity) process, sorted by replica
/// id. `purpose` tags the replica ids so that pools never share walks: replica
/// r uses walk_stream(seed, stream_tag(purpose, r)).
std::vector<ProcessSample> simulate_replicas(const RunConfig& cfg, std::int64_t count, StreamPurpose purpose,
                                             bool with_capacity, const GreenEvaluator* green = nullptr);

/// CSV with header replica,t,floor_nt,range_card[,cap]; one row per replica and
/// grid time.
std::string samples_csv(const std::vector<ProcessSample>& samples);

/// Everything the FCLT harness derives from one sample collection.
struct FcltAnalysis {
  std::string process;  // "capacity" or "range"
  double sigma_hat = 0.0;
  std::vector<std::pair<double, double>> variance_pairs;  // (n, Var)
  GrowthFit variance_fit;
  TestReport variance_linearity;
  TestReport normality_t1;
  TestReport fdd_covariance;
  std::vector<TestReport> cramer_wold;
  std::vector<TestReport> condition_ii;

  bool passed() const;
};

/// Analysis of `samples`, centered with the per-time means of `centering` (an
/// independent pool); when `centering` is empty the sample means are used.
FcltAnalysis analyze_fclt(const RunConfig& cfg, const std::vector<ProcessSample>& samples,
                          const std::vector<ProcessSample>& centering, bool capacity);

struct FcltRun {
  std::vector<ProcessSample> samples;
  FcltAnalysis analysis;
};
FcltRun run_fclt(const RunConfig& cfg, bool capacity);

/// JSON texts written by the commands (stable key order, 2-space indent).
std::string fclt_report_json(const RunConfig& cfg, const FcltAnalysis& a);

struct IntersectionPoint {
  std::int64_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;
};
/// E[I_n] over cfg.replicas pairs of independent walks, coupled across n.
std::vector<IntersectionPoint> intersection_means(const RunConfig& cfg);

// Command drivers. Each writes its artifacts and returns the command status;
// `log` receives one human-readable line per finding.
using LogFn = std::function<void(const std::string&)>;

Status command_walk_sim(const RunConfig& cfg, const std::string& out, LogFn log);
Status command_green_table(const RunConfig& cfg, const std::string& out, LogFn log);
Status command_capacity_exact(const RunConfig& cfg, const std::string& set_path, const std::string& out, LogFn log);
Status command_capacity_walk(const RunConfig& cfg, const std::string& out, LogFn log);
Status command_intersections(const RunConfig& cfg, const std::string& out, const std::string& report, LogFn log);
Status command_fclt(const RunConfig& cfg, bool capacity, const std::string& out, const std::string& report,
                    LogFn log);

/// Points file: a JSON list of coordinate arrays.
std::vector<LatticePoint> parse_point_set(const std::string& json_text);

}  // namespace stablewalk
