#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "dmfield/runner.hpp"

using namespace dmf;
namespace fs = std::filesystem;

namespace {

fs::path data(const char* name) { return fs::path(DMFIELD_TEST_DATA) / name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Runner, EmptyFilePasses) {
  RunReport r = run_file(data("empty.json"), {});
  EXPECT_TRUE(r.scenarios.empty());
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Runner, ConfigErrorsNameTheFile) {
  for (const char* f : {"bad_tolerance.json", "bad_syntax.json", "bad_reference.json", "bad_kind.json"}) {
    try {
      run_file(data(f), {});
      ADD_FAILURE() << f << " was accepted";
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(f), std::string::npos) << e.what();
    }
  }
}

TEST(Runner, SyntaxErrorsCarryLineAndColumn) {
  try {
    run_file(data("bad_syntax.json"), {});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(":"), std::string::npos);
  }
}

TEST(Runner, RejectsBadOptions) {
  RunOptions o;
  o.tolerance_scale = 0;
  EXPECT_THROW(run_gallery({"line-measure"}, o), ConfigError);
  o.tolerance_scale = 1;
  o.jobs = 0;
  EXPECT_THROW(run_gallery({"line-measure"}, o), ConfigError);
  EXPECT_THROW(run_gallery({"no-such-entry"}, {}), ConfigError);
}

TEST(Runner, NumericFailureSetsExitCodeOne) {
  RunReport r = run_file(data("failing.json"), {});
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.exit_code(), 1);
  ASSERT_EQ(r.failing().size(), 1u);
}

TEST(Runner, ReportsAreDeterministicAcrossJobCounts) {
  RunOptions one, two;
  two.jobs = 2;
  RunReport a = run_file(data("line_measure.json"), one);
  RunReport b = run_file(data("line_measure.json"), two);
  EXPECT_EQ(report_json(a), report_json(b));
  EXPECT_EQ(table_csv(a), table_csv(b));
  EXPECT_TRUE(a.passed());
}

TEST(Runner, ToleranceScaleWidensEveryCheck) {
  RunOptions o;
  o.tolerance_scale = 1e12;
  EXPECT_TRUE(run_file(data("failing.json"), o).passed());
}

TEST(Runner, WritesReportAndTable) {
  fs::path dir = fs::temp_directory_path() / "dmfield-runner-test";
  fs::remove_all(dir);
  RunReport r = run_gallery({"line-measure"}, {});
  write_report(r, dir);
  std::string csv = slurp(dir / "table.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "scenario,check,eps,delta,raw,extrapolated");
  std::string json = slurp(dir / "report.json");
  EXPECT_NE(json.find("\"pass\": true"), std::string::npos);
  EXPECT_NE(json.find("line-measure"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Runner, SolveDivWritesAFieldDescriptor) {
  fs::path out = fs::temp_directory_path() / "dmfield-solve-test.json";
  solve_div_file(data("measures/sigma_atom.json"), out, {}, 5);
  std::string s = slurp(out);
  EXPECT_NE(s.find("samples"), std::string::npos);
  fs::remove(out);
}
