#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stablewalk/experiment.hpp"
#include "stablewalk/stats.hpp"

namespace stablewalk {

struct CriterionResult {
  int id = 0;
  std::string name;
  Status status = Status::kFail;
  std::string summary;
  double seconds = 0.0;
  std::vector<Statistic> details;
};

struct VerifyOptions {
  std::optional<std::uint64_t> seed;  // overrides the config's master seed
  std::optional<int> workers;
  std::vector<int> only;  // run just these criteria (empty: all)
  /// Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

struct VerifyResult {
  std::vector<CriterionResult> criteria;
  Status overall = Status::kPass;
};

/// Runs the acceptance battery described by a verify config (see
/// configs/verify.json). Criteria that raise insufficient-replicas are marked
/// inconclusive; any other error marks the criterion failed.
VerifyResult verify_suite(const std::string& json_text, const VerifyOptions& opts = {});

/// One line per criterion: "[PASS] 3 structural identities: ...".
std::string format_result_line(const CriterionResult& r);

/// JSON report of a finished battery.
std::string verify_report_json(const VerifyResult& r);

}  // namespace stablewalk
