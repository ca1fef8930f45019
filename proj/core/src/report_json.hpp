#pragma once

#include "json.hpp"
#include "stablewalk/scaling.hpp"
#include "stablewalk/stats.hpp"

namespace stablewalk {

inline nlohmann::ordered_json report_to_json(const TestReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["sample_size"] = r.sample_size;
  if (r.proxy) j["proxy"] = true;
  if (!r.note.empty()) j["note"] = r.note;
  if (r.sigma_hat) j["sigma_hat"] = *r.sigma_hat;
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
  for (const auto& s : r.statistics) stats[s.name] = s.value;
  j["statistics"] = stats;
  nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"name", v.name},
                        {"pass", v.pass},
                        {"observed", v.observed},
                        {"threshold", v.threshold},
                        {"tolerance", v.tolerance}});
  }
  j["verdicts"] = verdicts;
  j["pass"] = r.passed();
  return j;
}

inline nlohmann::ordered_json fit_to_json(const GrowthFit& f) {
  return {{"slope", f.slope},       {"intercept", f.intercept}, {"std_error", f.std_error},
          {"ci_low", f.ci_low},     {"ci_high", f.ci_high},     {"level", f.level},
          {"points", f.points}};
}

}  // namespace stablewalk
