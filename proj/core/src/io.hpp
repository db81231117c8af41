#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmfield/entropy.hpp"
#include "dmfield/poisson.hpp"

namespace dmf::io {

using Json = nlohmann::json;

// Where a descriptor came from: a file plus a JSON pointer, for diagnostics.
struct Context {
  std::filesystem::path file;
  std::string pointer;
  std::vector<std::filesystem::path> search;  // directories tried for relative references

  Context at(const std::string& key) const;
  Context at(std::size_t index) const;
  [[noreturn]] void fail(const std::string& what) const;
};

// Parses a file; syntax errors become ConfigError with line and column.
Json read_file(const std::filesystem::path& p);
// A string is a reference to a descriptor file (resolved against the
// referencing file's directory, then the search path); objects are inline.
Json resolve(const Json& j, Context& ctx);

double number(const Json& j, const Context& ctx);
Vec2 point(const Json& j, const Context& ctx);
Box box(const Json& j, const Context& ctx);
// Number or constant expression ("pi/2").
double scalar(const Json& j, const Context& ctx);

RadonMeasure measure(const Json& j, const Box& window, const Context& ctx);
DMField field(const Json& j, const Context& ctx);
OpenSet set(const Json& j, const Box& window, const Context& ctx);
TestFunction test_function(const Json& j, const Box& window, const Context& ctx);
PiecewiseSolution solution(const Json& j, const Context& ctx);
EntropyPair entropy_pair(const Json& j, const ScalarFlux& flux, const Context& ctx);

// Expected value of a check: a number, or a linear functional of the test function
// {"constant": c, "points": [{"at": [x1,x2], "coef": expr}], "segments": [{"a","b","coef"}]}.
struct Expected {
  double constant = 0.0;
  std::vector<std::pair<Vec2, double>> points;
  std::vector<std::pair<std::pair<Vec2, Vec2>, double>> segments;

  double operator()(const TestFunction& phi) const;
};
Expected expected(const Json& j, const Context& ctx);

// Serialized Newtonian solve: the source measure plus field samples on a grid.
Json newtonian_json(const Json& sigma, const Box& window, const DMField& f, int samples);

}  // namespace dmf::io
