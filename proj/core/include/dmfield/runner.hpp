#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dmfield/divfield.hpp"
#include "dmfield/ladder.hpp"
#include "dmfield/normaltrace.hpp"

namespace dmf {

// One rung of a convergence ladder. Offset ladders fill eps, mollifier ladders delta.
struct LadderRow {
  double eps = std::nan("");
  double delta = std::nan("");
  double raw = 0.0;
  double extrapolated = 0.0;  // best extrapolant from the rungs up to this one
};

std::vector<LadderRow> ladder_rows(const LadderResult& r, bool delta);
std::vector<LadderRow> ladder_rows(const LimitValue& v);  // delta ladder when v.limit
std::vector<LadderRow> ladder_rows(const TraceResult& r);  // eps ladder

enum class Compare {
  absolute,  // |value - expected| <= tolerance
  relative,  // |value - expected| <= tolerance * |expected|
  at_most,   // value <= expected + tolerance
  at_least,  // value >= expected - tolerance
};

struct CheckRow {
  std::string label;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Compare compare = Compare::absolute;
  std::string provenance;
  std::vector<LadderRow> ladder;
  bool pass = false;
};

struct ScenarioReport {
  std::string name;
  std::string kind;
  std::vector<CheckRow> rows;
  std::string error;  // set when the scenario threw during evaluation
  bool passed() const;
};

struct RunOptions {
  std::uint64_t seed = 1;
  double tolerance_scale = 1.0;
  int jobs = 1;
  std::vector<std::filesystem::path> search;  // descriptor directories
};

struct RunReport {
  std::vector<ScenarioReport> scenarios;
  bool passed() const;
  std::vector<std::string> failing() const;
  int exit_code() const { return passed() ? 0 : 1; }
};

// Accumulates the rows of one scenario while it runs.
class ScenarioRun {
 public:
  ScenarioRun(std::string name, std::string kind, const RunOptions& opt, std::uint64_t seed);

  CheckRow& check(std::string label, double value, double expected, double tolerance, Compare compare,
                  std::string provenance);
  std::uint64_t seed() const { return seed_; }
  ScenarioReport take() { return std::move(report_); }

 private:
  ScenarioReport report_;
  double scale_;
  std::uint64_t seed_;
};

struct GalleryEntry {
  std::string name;
  std::string summary;
  std::function<void(ScenarioRun&)> run;
};

// Built-in scenarios reproducing the closed-form values of the theory.
const std::vector<GalleryEntry>& gallery_entries();

// Runs the named built-in scenarios (all when `names` is empty). Unknown names are a ConfigError.
RunReport run_gallery(const std::vector<std::string>& names, const RunOptions& opt);

// Parses every scenario of the file first (ConfigError with file/field diagnostics),
// then runs them, `opt.jobs` at a time, reporting in file order.
RunReport run_file(const std::filesystem::path& scenario_file, const RunOptions& opt);

// report.json and table.csv in `dir` (created when missing).
void write_report(const RunReport& r, const std::filesystem::path& dir);
std::string report_json(const RunReport& r);
std::string table_csv(const RunReport& r);

// Solves div F = -sigma for the measure descriptor file and writes the field descriptor
// with a grid of samples.
void solve_div_file(const std::filesystem::path& sigma_file, const std::filesystem::path& out,
                    const RunOptions& opt, int samples = 21);

// Directories listed in DMFIELD_DATA (colon separated).
std::vector<std::filesystem::path> data_path_from_env();

}  // namespace dmf
