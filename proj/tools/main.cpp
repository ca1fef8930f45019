// stablewalk: command line front end for the lattice walk toolkit.
//
//   stablewalk walk sim --config run.json --out samples.csv
//   stablewalk green table --config run.json --radius 8 --tol 1e-6 --out green.json
//   stablewalk capacity exact --config run.json --set points.json --out cap.json
//   stablewalk capacity walk --config run.json --out cap.csv
//   stablewalk intersections --config run.json --out inter.csv --report inter.json
//   stablewalk fclt cap --config run.json --report report.json
//   stablewalk fclt range --config run.json --report report.json
//   stablewalk verify --config configs/verify.json
//
// Exit status: 0 pass, 1 failure, 2 inconclusive.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stablewalk/config.hpp"
#include "stablewalk/error.hpp"
#include "stablewalk/experiment.hpp"
#include "stablewalk/verify.hpp"

namespace sw = stablewalk;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string report;
  std::string set;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::int64_t> radius;
  std::optional<double> tol;
  std::vector<int> only;
};

void common(CLI::App* cmd, Flags& f, bool config_required = true) {
  auto* c = cmd->add_option("--config", f.config, "run configuration (JSON)")->check(CLI::ExistingFile);
  if (config_required) c->required();
  cmd->add_option("--seed", f.seed, "override the master seed");
  cmd->add_option("--workers", f.workers, "worker threads (outputs do not depend on it)")->check(CLI::PositiveNumber);
}

sw::RunConfig load(const Flags& f) {
  sw::RunConfig cfg = sw::load_run_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.workers) cfg.workers = *f.workers;
  if (f.radius) cfg.green_radius = *f.radius;
  if (f.tol) cfg.green_tol = *f.tol;
  return cfg;
}

std::string pick(const std::string& flag, const std::string& fallback, const char* what) {
  if (!flag.empty()) return flag;
  if (!fallback.empty()) return fallback;
  throw sw::Error(sw::ErrorCode::kConfigInvalid, std::string("no ") + what + " path: pass it on the command line or under outputs");
}

void log_line(const std::string& s) { std::cout << s << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-stable lattice random walk toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto* walk = app.add_subcommand("walk", "walk simulation")->require_subcommand(1);
  auto* walk_sim = walk->add_subcommand("sim", "simulate range samples to CSV");
  common(walk_sim, f);
  walk_sim->add_option("--out", f.out, "samples CSV");

  auto* green = app.add_subcommand("green", "Green function")->require_subcommand(1);
  auto* green_table = green->add_subcommand("table", "tabulate G(0, x) with error bounds");
  common(green_table, f);
  green_table->add_option("--out", f.out, "table JSON");
  green_table->add_option("--radius", f.radius, "tabulation radius")->check(CLI::NonNegativeNumber);
  green_table->add_option("--tol", f.tol, "target absolute error")->check(CLI::PositiveNumber);

  auto* cap = app.add_subcommand("capacity", "capacity estimation")->require_subcommand(1);
  auto* cap_exact = cap->add_subcommand("exact", "equilibrium solve for a point set");
  common(cap_exact, f);
  cap_exact->add_option("--set", f.set, "point set (JSON list of coordinate arrays)")
      ->required()
      ->check(CLI::ExistingFile);
  cap_exact->add_option("--out", f.out, "result JSON (default: stdout)");
  cap_exact->add_option("--tol", f.tol, "Green tolerance")->check(CLI::PositiveNumber);
  auto* cap_walk = cap->add_subcommand("walk", "capacity process along simulated walks");
  common(cap_walk, f);
  cap_walk->add_option("--out", f.out, "samples CSV");

  auto* inter = app.add_subcommand("intersections", "E[I_n] for two independent walks");
  common(inter, f);
  inter->add_option("--out", f.out, "means CSV");
  inter->add_option("--report", f.report, "growth report JSON");

  auto* fclt = app.add_subcommand("fclt", "functional CLT harness")->require_subcommand(1);
  auto* fclt_cap = fclt->add_subcommand("cap", "capacity process");
  auto* fclt_range = fclt->add_subcommand("range", "range process");
  for (auto* c : {fclt_cap, fclt_range}) {
    common(c, f);
    c->add_option("--out", f.out, "samples CSV (optional)");
    c->add_option("--report", f.report, "test report JSON");
  }

  auto* verify = app.add_subcommand("verify", "run the acceptance battery");
  common(verify, f);
  verify->add_option("--report", f.report, "battery report JSON");
  verify->add_option("--only", f.only, "criterion ids to run (default: all)")->check(CLI::Range(1, 10));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    sw::Status st = sw::Status::kPass;
    if (walk_sim->parsed()) {
      const auto cfg = load(f);
      st = sw::command_walk_sim(cfg, pick(f.out, cfg.samples_path, "output"), log_line);
    } else if (green_table->parsed()) {
      const auto cfg = load(f);
      st = sw::command_green_table(cfg, pick(f.out, cfg.report_path, "output"), log_line);
    } else if (cap_exact->parsed()) {
      const auto cfg = load(f);
      st = sw::command_capacity_exact(cfg, f.set, f.out.empty() ? cfg.report_path : f.out, log_line);
    } else if (cap_walk->parsed()) {
      const auto cfg = load(f);
      st = sw::command_capacity_walk(cfg, pick(f.out, cfg.samples_path, "output"), log_line);
    } else if (inter->parsed()) {
      const auto cfg = load(f);
      st = sw::command_intersections(cfg, pick(f.out, cfg.samples_path, "output"),
                                     f.report.empty() ? cfg.report_path : f.report, log_line);
    } else if (fclt_cap->parsed() || fclt_range->parsed()) {
      const auto cfg = load(f);
      st = sw::command_fclt(cfg, fclt_cap->parsed(), f.out.empty() ? cfg.samples_path : f.out,
                            f.report.empty() ? cfg.report_path : f.report, log_line);
    } else if (verify->parsed()) {
      sw::VerifyOptions opts;
      opts.seed = f.seed;
      opts.workers = f.workers;
      opts.only = f.only;
      opts.on_result = [](const sw::CriterionResult& r) { std::cout << sw::format_result_line(r) << std::endl; };
      const sw::VerifyResult r = sw::verify_suite(sw::read_file(f.config), opts);
      if (!f.report.empty()) sw::write_file(f.report, sw::verify_report_json(r));
      std::cout << "overall: " << sw::to_string(r.overall) << '\n';
      st = r.overall;
    }
    return static_cast<int>(st);
  } catch (const sw::Error& e) {
    std::cerr << "stablewalk: " << e.what() << '\n';
    return static_cast<int>(sw::status_of(e));
  } catch (const std::exception& e) {
    std::cerr << "stablewalk: " << e.what() << '\n';
    return 1;
  }
}
