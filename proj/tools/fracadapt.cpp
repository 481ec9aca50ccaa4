#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include "fracadapt/experiment.hpp"

using namespace fracadapt;

namespace {

void log_run(const RunOutcome& o) {
  std::fprintf(stderr, "%-60s M=%-6zu err=%-12.4g %s%s\n", o.spec.id.c_str(), o.report.intervals(),
               o.report.max_error, o.report.status.c_str(), o.checks_pass() ? "" : "  [check failed]");
}

int run_config(const std::string& path, const std::string& out_flag, unsigned threads, bool sweep) {
  ExperimentConfig c = load_config(path);
  const Plan plan = make_plan(c);
  if (!sweep && plan.series.size() > 1) {
    throw ConfigError("run: config expands to " + std::to_string(plan.series.size()) +
                      " series; use sweep, or give single values for alpha, method, barrier, lambda and Q1");
  }
  const std::string out = out_flag.empty() ? c.out : out_flag;
  std::vector<RunOutcome> outcomes = execute_plan(plan, threads, log_run);
  const json summary = write_outputs(out, plan, outcomes, sweep ? "sweep" : "run");
  for (const auto& s : summary["series"]) {
    if (s["rows"].size() > 1) {
      std::fprintf(stderr, "%-60s slope=%s (expected %.3g)\n", s["id"].get<std::string>().c_str(),
                   s["slope"].is_null() ? "n/a" : std::to_string(s["slope"].get<double>()).c_str(),
                   s["expected_slope"].get<double>());
    }
  }
  std::fprintf(stderr, "wrote %s\n", (std::filesystem::path(out) / "summary.json").string().c_str());
  return summary["all_checks_pass"].get<bool>() ? 0 : 1;
}

int verify(const std::string& report, const std::string& out_flag, int points) {
  VerifyResult v = verify_report(report, points);
  if (!out_flag.empty()) v.outcome.dir = out_flag;
  std::filesystem::create_directories(v.outcome.dir);
  {
    std::ofstream os(std::filesystem::path(v.outcome.dir) / "bound.csv");
    write_bound_csv(os, v.outcome.bound);
  }
  const json j = {{"schema", "fracadapt-verify/1"},
                  {"report", report},
                  {"residual_roundtrip", v.residual_roundtrip},
                  {"roundtrip_pass", v.roundtrip_pass},
                  {"error_check", detail::check_json(v.outcome.error_check)},
                  {"bound_check", detail::check_json(v.outcome.bound_check)},
                  {"pass", v.pass}};
  std::ofstream os(std::filesystem::path(v.outcome.dir) / "verify.json");
  os << j.dump(2) << '\n';
  std::cout << j.dump(2) << '\n';
  return v.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive time stepping for time-fractional subdiffusion"};
  app.require_subcommand(1);
  std::string out;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--threads", threads, "concurrent runs")->check(CLI::PositiveNumber);

  std::string config, report;
  int points = 0;
  auto* run = app.add_subcommand("run", "one series: a TOL list or a list of fixed meshes");
  run->add_option("config", config, "config file")->required();
  auto* sweep = app.add_subcommand("sweep", "cartesian product of all list-valued keys");
  sweep->add_option("config", config, "config file")->required();
  auto* ver = app.add_subcommand("verify-bounds", "re-check a stored run report");
  ver->add_option("report", report, "report.json")->required();
  ver->add_option("--bound-points", points, "residual samples per interval for the envelope");
  for (auto* s : {run, sweep, ver}) s->fallthrough();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_config(config, out, threads, false);
    if (*sweep) return run_config(config, out, threads, true);
    return verify(report, out, points);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
