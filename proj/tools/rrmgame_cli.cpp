// rrmgame: run route-mutation defense scenarios and check the equilibrium
// classification.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rrmgame/equilibrium.hpp"
#include "rrmgame/error.hpp"
#include "rrmgame/harness.hpp"

namespace fs = std::filesystem;
using namespace rrmgame;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kConfig = 2;
constexpr int kVerify = 3;

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << content;
}

template <typename F>
std::string capture(F&& f) {
  std::ostringstream ss;
  f(ss);
  return ss.str();
}

int cmd_run(const std::string& scenario, const std::string& out_dir) {
  const auto cfg = parse_scenario(scenario);
  const auto run = run_scenario(cfg);
  const auto summary = capture([&](std::ostream& o) { write_summary_csv(o, {run.report}); });
  if (out_dir.empty()) {
    std::cout << summary;
    return kOk;
  }
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_file(dir / "summary.csv", summary);
  write_file(dir / "timeseries.csv",
             capture([&](std::ostream& o) { write_timeseries_csv(o, run.report); }));
  write_file(dir / "decisions.csv", run.decisions_csv);
  write_file(dir / "report.json", report_json(run));
  if (run.plan) {
    write_file(dir / "attack_schedule.csv", run.schedule_csv);
    write_file(dir / "attack_assignment.csv", run.assignment_csv);
  }
  std::cout << summary;
  return kOk;
}

int cmd_sweep(const std::string& scenario, const std::string& axis,
              const std::vector<std::string>& values, const std::string& out_dir) {
  const auto base = parse_scenario(scenario);
  const auto reports = run_sweep(base, parse_axis(axis), values);
  const auto summary = capture([&](std::ostream& o) { write_summary_csv(o, reports); });
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "summary.csv", summary);
  }
  std::cout << summary;
  return kOk;
}

int cmd_verify(std::size_t samples, std::uint64_t seed, bool reference, double theta) {
  const auto check = reference ? verify_equilibria_at(PayoffParams::reference(), theta)
                               : verify_equilibria(samples, seed);
  if (reference) {
    const auto found = enumerate_pbne_bruteforce(PayoffParams::reference(), theta);
    std::cout << fmt::format("theta={} theta*={} lambda*={}\n", theta,
                             theta_star(PayoffParams::reference()),
                             lambda_star(PayoffParams::reference()));
    for (const auto& e : found) std::cout << "  " << e.profile.label() << '\n';
  }
  write_equilibrium_report(std::cout, check);
  return check.passed() ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Route mutation defense against link-flooding attacks"};
  app.require_subcommand(1);

  std::string scenario, out_dir, axis;
  std::vector<std::string> values;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("scenario", scenario, "Scenario file")->required();
  run->add_option("--out", out_dir, "Directory for CSV and JSON outputs");

  auto* sweep = app.add_subcommand("sweep", "Run a scenario across values of one axis");
  sweep->add_option("scenario", scenario, "Scenario file")->required();
  sweep->add_option("--axis", axis, "strategy | period | attacker-model | seed")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--out", out_dir, "Directory for summary.csv");

  std::size_t samples = 1000;
  std::uint64_t seed = 42;
  bool reference = false;
  double theta = 0.95;
  auto* verify = app.add_subcommand("verify-equilibria",
                                    "Compare brute-force equilibria with the threshold table");
  verify->add_option("--samples", samples, "Random parameter draws")->required();
  verify->add_option("--seed", seed, "Seed for the draws")->required();
  verify->add_flag("--reference", reference, "Check only the default parameters at --theta");
  verify->add_option("--theta", theta, "Prior probability of a bot (with --reference)");

  app.add_subcommand("print-defaults", "Print a scenario file with every default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(scenario, out_dir);
    if (*sweep) return cmd_sweep(scenario, axis, values, out_dir);
    if (*verify) {
      if (samples == 0) {
        std::cerr << "error: --samples must be at least 1\n";
        return kUsage;
      }
      if (!(theta > 0.0 && theta < 1.0)) {
        std::cerr << "error: --theta must lie strictly between 0 and 1\n";
        return kUsage;
      }
      return cmd_verify(samples, seed, reference, theta);
    }
    ScenarioConfig defaults;
    defaults.seed = 1;
    std::cout << to_text(defaults);
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}
