#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "stablewalk/config.hpp"
#include "stablewalk/error.hpp"
#include "stablewalk/experiment.hpp"
#include "stablewalk/verify.hpp"

using namespace stablewalk;
using nlohmann::json;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kIo;
}

json small_config() {
  return json::parse(R"({
    "law": {"d": 2, "alpha": 0.7, "loop_prob": 0.25, "family": "axial-power-law"},
    "n": 128, "n_values": [32, 64, 128], "t_grid": {"uniform_steps": 80},
    "replicas": 500, "centering_replicas": 500, "seed": 3,
    "green": {"radius": 3, "tol": 1e-6},
    "fclt": {"bootstrap": 50}
  })");
}

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / ("stablewalk-test-" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  CHECK(parse_error("") == ErrorCode::kConfigInvalid);
  CHECK(parse_error("{}") == ErrorCode::kConfigInvalid);
  CHECK(parse_error(R"({"n": 10})") == ErrorCode::kConfigInvalid);
  json j = small_config();
  j["bogus"] = 1;
  CHECK(parse_error(j.dump()) == ErrorCode::kConfigInvalid);
  j = small_config();
  j["tolerances"] = {{"not_a_tolerance", 0.1}};
  CHECK(parse_error(j.dump()) == ErrorCode::kConfigInvalid);
  j = small_config();
  j["t_grid"] = {0.0, 0.5, 0.25};
  CHECK(parse_error(j.dump()) == ErrorCode::kConfigInvalid);

  const RunConfig c = parse_run_config(small_config().dump());
  CHECK(c.t_grid.size() == 81);
  CHECK(c.seed == 3);
  CHECK(c.tolerance("max_abs_skewness") == 0.15);
  CHECK_THROWS_AS(c.tolerance("nope"), Error);
  const RunConfig round = parse_run_config(c.to_json());
  CHECK(round.to_json() == c.to_json());
}

TEST_CASE("default n values") {
  json j = small_config();
  j.erase("n_values");
  j["n"] = 4096;
  CHECK(parse_run_config(j.dump()).n_values == std::vector<std::int64_t>{256, 512, 1024, 2048, 4096});
}

TEST_CASE("regime checks") {
  json j = small_config();
  j["law"]["alpha"] = 1.2;
  try {
    check_regime(parse_run_config(j.dump()), Experiment::kFcltCapacity);
    FAIL("expected regime-violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRegimeViolation);
    CHECK(std::string(e.what()).find("5/2") != std::string::npos);
  }
  j["law"]["alpha"] = 1.0;
  CHECK_NOTHROW(check_regime(parse_run_config(j.dump()), Experiment::kFcltRange));
  j["law"]["alpha"] = 1.5;
  CHECK_THROWS_AS(check_regime(parse_run_config(j.dump()), Experiment::kFcltRange), Error);
  j["law"] = {{"d", 1}, {"alpha", 1.5}, {"loop_prob", 0.25}, {"family", "axial-power-law"}};
  CHECK_THROWS_AS(check_regime(parse_run_config(j.dump()), Experiment::kGreen), Error);
  CHECK_NOTHROW(check_regime(parse_run_config(j.dump()), Experiment::kWalk));
}

TEST_CASE("commands are reproducible and worker independent") {
  TempDir dir;
  json j = small_config();
  RunConfig one = parse_run_config(j.dump());
  j["workers"] = 3;
  RunConfig three = parse_run_config(j.dump());
  command_walk_sim(one, dir.file("a.csv"), nullptr);
  command_walk_sim(one, dir.file("b.csv"), nullptr);
  command_walk_sim(three, dir.file("c.csv"), nullptr);
  CHECK(read_file(dir.file("a.csv")) == read_file(dir.file("b.csv")));
  CHECK(read_file(dir.file("a.csv")) == read_file(dir.file("c.csv")));
  CHECK(read_file(dir.file("a.csv")).rfind("replica,t,floor_nt,range_card\n", 0) == 0);

  command_capacity_walk(one, dir.file("cap1.csv"), nullptr);
  command_capacity_walk(three, dir.file("cap3.csv"), nullptr);
  CHECK(read_file(dir.file("cap1.csv")) == read_file(dir.file("cap3.csv")));
  CHECK(read_file(dir.file("cap1.csv")).rfind("replica,t,floor_nt,range_card,cap\n", 0) == 0);

  command_fclt(one, false, "", dir.file("r1.json"), nullptr);
  command_fclt(three, false, "", dir.file("r3.json"), nullptr);
  CHECK(read_file(dir.file("r1.json")) == read_file(dir.file("r3.json")));
  const json report = json::parse(read_file(dir.file("r1.json")));
  CHECK(report.contains("tolerances"));
}

TEST_CASE("capacity exact command") {
  TempDir dir;
  write_file(dir.file("set.json"), "[[0, 0], [1, 0], [0, 0]]");
  const RunConfig c = parse_run_config(small_config().dump());
  command_capacity_exact(c, dir.file("set.json"), dir.file("cap.json"), nullptr);
  const json out = json::parse(read_file(dir.file("cap.json")));
  CHECK(out["set_size"] == 2);
  CHECK(out["equilibrium"].size() == 2);
  write_file(dir.file("bad.json"), "[[0, 0], [1, 0, 2]]");
  CHECK_THROWS_AS(command_capacity_exact(c, dir.file("bad.json"), dir.file("x.json"), nullptr), Error);
  CHECK(parse_point_set("[[1, -2, 3]]").front() == LatticePoint{1, -2, 3});
}

TEST_CASE("status mapping") {
  CHECK(combine(Status::kPass, Status::kInconclusive) == Status::kInconclusive);
  CHECK(combine(Status::kFail, Status::kInconclusive) == Status::kFail);
  CHECK(status_of(Error(ErrorCode::kInsufficientReplicas, "x")) == Status::kInconclusive);
  CHECK(status_of(Error(ErrorCode::kRegimeViolation, "x")) == Status::kFail);
  CHECK(to_string(Status::kPass) == "PASS");
}

TEST_CASE("verify with an empty config") {
  try {
    verify_suite("{}");
    FAIL("expected config-invalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigInvalid);
  }
  CHECK_THROWS_AS(verify_suite(""), Error);
}

TEST_CASE("verify with too few replicas is inconclusive") {
  json j = json::parse(read_file(STABLEWALK_CONFIG_DIR "/verify.json"));
  j["fclt_capacity"]["replicas"] = 10;
  j["fclt_range"]["replicas"] = 10;
  VerifyOptions o;
  o.only = {5, 6, 9};
  const VerifyResult r = verify_suite(j.dump(), o);
  REQUIRE(r.criteria.size() == 3);
  for (const auto& c : r.criteria) {
    CHECK(c.status == Status::kInconclusive);
    CHECK(c.summary.find("insufficient-replicas") != std::string::npos);
  }
  CHECK(r.overall == Status::kInconclusive);
  const std::string line = format_result_line(r.criteria.front());
  CHECK(line.rfind("[INCONCLUSIVE] 5 variance linearity: ", 0) == 0);
  const json rep = json::parse(verify_report_json(r));
  CHECK(rep["overall"] == "INCONCLUSIVE");
}

TEST_CASE("verify runs selected cheap criteria") {
  const VerifyResult r = verify_suite(read_file(STABLEWALK_CONFIG_DIR "/verify.json"), VerifyOptions{{}, {}, {4}, {}});
  REQUIRE(r.criteria.size() == 1);
  CHECK(r.criteria[0].id == 4);
  CHECK(r.criteria[0].status == Status::kPass);
}

}
