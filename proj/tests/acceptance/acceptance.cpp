// Runs the full acceptance battery from configs/verify.json and prints one
// verdict line per criterion. Exit status follows the CLI: 0 pass, 1 fail,
// 2 inconclusive.

#include <iostream>
#include <string>

#include "stablewalk/config.hpp"
#include "stablewalk/verify.hpp"

int main(int argc, char** argv) {
  namespace sw = stablewalk;
  const std::string path = argc > 1 ? argv[1] : STABLEWALK_CONFIG_DIR "/verify.json";
  try {
    sw::VerifyOptions opts;
    opts.on_result = [](const sw::CriterionResult& r) { std::cout << sw::format_result_line(r) << std::endl; };
    const sw::VerifyResult result = sw::verify_suite(sw::read_file(path), opts);
    std::size_t passed = 0;
    for (const auto& c : result.criteria) passed += c.status == sw::Status::kPass;
    std::cout << "acceptance: " << passed << "/" << result.criteria.size() << " criteria pass, overall "
              << sw::to_string(result.overall) << std::endl;
    return static_cast<int>(result.overall);
  } catch (const sw::Error& e) {
    std::cerr << "acceptance: " << e.what() << std::endl;
    return static_cast<int>(sw::status_of(e));
  }
}
