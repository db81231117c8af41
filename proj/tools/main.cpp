#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "dmfield/runner.hpp"

namespace {

void print_summary(const dmf::RunReport& r) {
  for (const auto& s : r.scenarios) {
    int failed = 0;
    for (const auto& row : s.rows) failed += row.pass ? 0 : 1;
    std::printf("%s %-20s %zu checks", s.passed() ? "PASS" : "FAIL", s.name.c_str(), s.rows.size());
    if (failed) std::printf(", %d failed", failed);
    if (!s.error.empty()) std::printf(", error: %s", s.error.c_str());
    std::printf("\n");
    for (const auto& row : s.rows)
      if (!row.pass)
        std::printf("     %-44s value %.10g expected %.10g tolerance %.3g\n", row.label.c_str(), row.value, row.expected,
                    row.tolerance);
  }
  if (!r.passed()) {
    std::printf("failing:");
    for (const auto& n : r.failing()) std::printf(" %s", n.c_str());
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal traces, fluxes and divergence-measure fields: batch verification"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  dmf::RunOptions opt;
  std::string scenario, out = "dmfield-report";
  app.add_option("--scenario", scenario, "scenario file to run")->check(CLI::ExistingFile);
  app.add_option("--out", out, "directory for report.json and table.csv");
  app.add_option("--seed", opt.seed, "seed for randomized sampling");
  app.add_option("--tolerance-scale", opt.tolerance_scale, "multiplies every tolerance");
  app.add_option("--jobs", opt.jobs, "scenarios run concurrently");

  std::vector<std::string> names;
  auto* verify = app.add_subcommand("verify", "run named built-in scenarios");
  verify->add_option("name", names, "gallery scenario names")->required();
  auto* gallery = app.add_subcommand("gallery", "run every built-in scenario");
  auto* list = app.add_subcommand("list", "list the built-in scenarios");
  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("--scenario", scenario, "scenario file")->check(CLI::ExistingFile)->required();
  std::string sigma, field_out;
  int samples = 21;
  auto* solve = app.add_subcommand("solve-div", "solve div F = -sigma by the Newtonian potential");
  solve->add_option("--sigma", sigma, "measure descriptor file")->required();
  solve->add_option("--out", field_out, "field descriptor written here")->required();
  solve->add_option("--samples", samples, "grid samples per axis in the output")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  opt.search = dmf::data_path_from_env();
  auto start = std::chrono::steady_clock::now();
  try {
    if (*list) {
      for (const auto& e : dmf::gallery_entries()) std::printf("%-20s %s\n", e.name.c_str(), e.summary.c_str());
      return 0;
    }
    if (*solve) {
      dmf::solve_div_file(sigma, field_out, opt, samples);
      std::printf("wrote %s\n", field_out.c_str());
      return 0;
    }
    dmf::RunReport report;
    if (*verify) report = dmf::run_gallery(names, opt);
    else if (*gallery) report = dmf::run_gallery({}, opt);
    else if (!scenario.empty()) report = dmf::run_file(scenario, opt);
    else {
      std::cerr << app.help();
      return 2;
    }
    dmf::write_report(report, out);
    print_summary(report);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "%zu scenarios in %.1f s; report in %s\n", report.scenarios.size(), secs, out.c_str());
    return report.exit_code();
  } catch (const dmf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
}
