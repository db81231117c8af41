#include "dmfield/runner.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "dmfield/cauchyflux.hpp"
#include "dmfield/entropy.hpp"
#include "dmfield/poisson.hpp"
#include "io.hpp"

namespace dmf {

namespace fs = std::filesystem;
using io::Context;
using io::Json;

std::vector<LadderRow> ladder_rows(const LadderResult& r, bool delta) {
  std::vector<LadderRow> out;
  for (std::size_t k = 0; k < r.h.size(); ++k) {
    LadderRow row;
    (delta ? row.delta : row.eps) = r.h[k];
    row.raw = r.raw[k];
    row.extrapolated = k < r.tableau.size() && !r.tableau[k].empty() ? r.tableau[k].back() : r.raw[k];
    out.push_back(row);
  }
  return out;
}

std::vector<LadderRow> ladder_rows(const LimitValue& v) {
  if (!v.limit) return {};
  return ladder_rows(v.ladder, true);
}

std::vector<LadderRow> ladder_rows(const TraceResult& r) {
  if (r.ladder_h.empty()) return {};
  LadderOptions lo;
  lo.max_columns = 4;
  return ladder_rows(richardson(r.ladder_h, r.ladder_raw, lo), false);
}

bool ScenarioReport::passed() const {
  if (!error.empty()) return false;
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

bool RunReport::passed() const {
  for (const auto& s : scenarios)
    if (!s.passed()) return false;
  return true;
}

std::vector<std::string> RunReport::failing() const {
  std::vector<std::string> out;
  for (const auto& s : scenarios)
    if (!s.passed()) out.push_back(s.name);
  return out;
}

ScenarioRun::ScenarioRun(std::string name, std::string kind, const RunOptions& opt, std::uint64_t seed)
    : scale_(opt.tolerance_scale), seed_(seed) {
  report_.name = std::move(name);
  report_.kind = std::move(kind);
}

CheckRow& ScenarioRun::check(std::string label, double value, double expected, double tolerance, Compare compare,
                             std::string provenance) {
  CheckRow r;
  r.label = std::move(label);
  r.value = value;
  r.expected = expected;
  r.tolerance = tolerance * scale_;
  r.compare = compare;
  r.provenance = std::move(provenance);
  double t = r.tolerance;
  switch (compare) {
    case Compare::absolute: r.pass = std::abs(value - expected) <= t; break;
    case Compare::relative: r.pass = std::abs(value - expected) <= t * std::abs(expected); break;
    case Compare::at_most: r.pass = value <= expected + t; break;
    case Compare::at_least: r.pass = value >= expected - t; break;
  }
  if (!std::isfinite(value)) r.pass = false;
  report_.rows.push_back(std::move(r));
  return report_.rows.back();
}

namespace {

struct Planned {
  std::string name;
  std::string kind;
  std::uint64_t seed;
  std::function<void(ScenarioRun&)> run;
};

void check_options(const RunOptions& opt) {
  if (!(opt.tolerance_scale > 0) || !std::isfinite(opt.tolerance_scale))
    throw ConfigError("tolerance scale must be positive");
  if (opt.jobs < 1) throw ConfigError("jobs must be at least 1");
}

RunReport execute(const std::vector<Planned>& plan, const RunOptions& opt) {
  RunReport rep;
  rep.scenarios.resize(plan.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      ScenarioRun run(plan[i].name, plan[i].kind, opt, plan[i].seed);
      std::string error;
      try {
        plan[i].run(run);
      } catch (const std::exception& e) {
        error = e.what();
      }
      rep.scenarios[i] = run.take();
      rep.scenarios[i].error = error;
    }
  };
  int n = std::min<int>(opt.jobs, static_cast<int>(plan.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rep;
}

const GalleryEntry& find_entry(const std::string& name) {
  for (const auto& e : gallery_entries())
    if (e.name == name) return e;
  std::string known;
  for (const auto& e : gallery_entries()) known += (known.empty() ? "" : ", ") + e.name;
  throw ConfigError("unknown gallery scenario '" + name + "' (known: " + known + ")");
}

// ---------------------------------------------------------------------------
// Scenario file parsing

const Json& need(const Json& j, const char* key, const Context& ctx) {
  if (!j.is_object()) ctx.fail("expected an object");
  auto it = j.find(key);
  if (it == j.end()) ctx.fail(std::string("missing field '") + key + "'");
  return *it;
}

double tolerance(const Json& s, const Context& ctx) {
  double t = io::scalar(need(s, "tolerance", ctx), ctx.at("tolerance"));
  if (!(t > 0) || !std::isfinite(t)) ctx.at("tolerance").fail("tolerance must be positive");
  return t;
}

Compare compare_mode(const Json& s, const Context& ctx, Compare fallback) {
  if (!s.contains("compare")) return fallback;
  const Json& c = s["compare"];
  std::string v = c.is_string() ? c.get<std::string>() : "";
  if (v == "absolute") return Compare::absolute;
  if (v == "relative") return Compare::relative;
  ctx.at("compare").fail("compare must be \"absolute\" or \"relative\"");
}

LadderOptions ladder(const Json& s, const Context& ctx, LadderOptions lo) {
  if (!s.contains("ladder")) return lo;
  const Json& l = s["ladder"];
  Context cl = ctx.at("ladder");
  if (!l.is_object()) cl.fail("expected an object");
  for (auto it = l.begin(); it != l.end(); ++it) {
    double v = io::number(it.value(), cl.at(it.key()));
    if (it.key() == "h0") lo.h0 = v;
    else if (it.key() == "ratio") lo.ratio = v;
    else if (it.key() == "rungs") lo.rungs = static_cast<int>(v);
    else if (it.key() == "order") lo.order = v;
    else if (it.key() == "tol") lo.tol = v;
    else cl.at(it.key()).fail("unknown ladder option (h0, ratio, rungs, order, tol)");
  }
  if (!(lo.ratio > 0 && lo.ratio < 1)) cl.at("ratio").fail("ratio must lie in (0, 1)");
  if (lo.rungs < 2) cl.at("rungs").fail("need at least two rungs");
  if (lo.h0 < 0) cl.at("h0").fail("h0 must be non-negative");
  return lo;
}

std::vector<TestFunction> tests(const Json& s, const Box& window, const Context& ctx) {
  const Json& t = need(s, "tests", ctx);
  Context ct = ctx.at("tests");
  if (!t.is_array() || t.empty()) ct.fail("expected a non-empty array of test functions");
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back(io::test_function(t[i], window, ct.at(i)));
  return out;
}

std::vector<io::Expected> expectations(const Json& s, std::size_t n, const Context& ctx) {
  const Json& e = need(s, "expected", ctx);
  Context ce = ctx.at("expected");
  std::vector<io::Expected> out;
  if (e.is_array()) {
    if (e.size() != n) ce.fail("expected one entry per test function");
    for (std::size_t i = 0; i < n; ++i) out.push_back(io::expected(e[i], ce.at(i)));
  } else {
    out.assign(n, io::expected(e, ce));
  }
  return out;
}

std::string label_of(const TestFunction& phi, std::size_t i) { return phi.name + "#" + std::to_string(i); }

Planned plan_trace(const Json& s, const Context& ctx, const std::string& prov) {
  DMField f = io::field(need(s, "field", ctx), ctx.at("field"));
  OpenSet u = io::set(need(s, "set", ctx), f.window, ctx.at("set"));
  auto phis = tests(s, f.window, ctx);
  auto exp = expectations(s, phis.size(), ctx);
  double tol = tolerance(s, ctx);
  Compare cmp = compare_mode(s, ctx, Compare::absolute);
  std::string route = s.contains("route") ? s["route"].get<std::string>() : "functional";
  static const std::vector<std::string> routes{"functional", "closed", "exterior", "limit", "averaged"};
  if (std::find(routes.begin(), routes.end(), route) == routes.end())
    ctx.at("route").fail("route must be functional, closed, exterior, limit or averaged");
  TraceOptions to;
  to.eps = ladder(s, ctx, to.eps);
  if (s.contains("convention")) {
    std::string c = s["convention"].is_string() ? s["convention"].get<std::string>() : "";
    if (c == "outward") to.convention = Convention::outward;
    else if (c != "interior") ctx.at("convention").fail("convention must be interior or outward");
  }
  return {"", "trace", 0, [=](ScenarioRun& run) {
            for (std::size_t i = 0; i < phis.size(); ++i) {
              TraceResult r;
              if (route == "functional") r = trace_functional(f, u, phis[i], false, to);
              else if (route == "closed") r = trace_functional(f, u, phis[i], true, to);
              else if (route == "exterior") r = exterior_trace(f, u, phis[i], to);
              else if (route == "limit") r = trace_limit(f, u, phis[i], to);
              else r = trace_averaged(f, u, phis[i], to);
              run.check(route + " " + label_of(phis[i], i), r.value, exp[i](phis[i]), tol, cmp, prov).ladder =
                  ladder_rows(r);
            }
          }};
}

Planned plan_coarea(const Json& s, const Context& ctx, const std::string& prov) {
  DMField f = io::field(need(s, "field", ctx), ctx.at("field"));
  OpenSet u = io::set(need(s, "set", ctx), f.window, ctx.at("set"));
  auto phis = tests(s, f.window, ctx);
  double tol = tolerance(s, ctx);
  return {"", "coarea", 0, [=](ScenarioRun& run) {
            for (std::size_t i = 0; i < phis.size(); ++i) {
              CoareaResult r = coarea_check(f, u, phis[i]);
              run.check("coarea residual " + label_of(phis[i], i), r.residual, 0.0, tol, Compare::at_most, prov);
            }
          }};
}

Planned plan_jump(const Json& s, const Context& ctx, const std::string& prov) {
  DMField f = io::field(need(s, "field", ctx), ctx.at("field"));
  OpenSet u = io::set(need(s, "set", ctx), f.window, ctx.at("set"));
  auto phis = tests(s, f.window, ctx);
  auto exp = expectations(s, phis.size(), ctx);
  double tol = tolerance(s, ctx);
  Compare cmp = compare_mode(s, ctx, Compare::absolute);
  return {"", "jump", 0, [=](ScenarioRun& run) {
            for (std::size_t i = 0; i < phis.size(); ++i) {
              JumpResult r = jump(f, u, phis[i]);
              run.check("jump " + label_of(phis[i], i), r.value, exp[i](phis[i]), tol, cmp, prov);
            }
          }};
}

Planned plan_roundtrip(const Json& s, const Context& ctx, const std::string& prov) {
  DMField f = io::field(need(s, "field", ctx), ctx.at("field"));
  double tol = tolerance(s, ctx);
  SliceOptions so;
  if (s.contains("t_panels")) so.t_panels = static_cast<int>(io::number(s["t_panels"], ctx.at("t_panels")));
  if (so.t_panels < 2) ctx.at("t_panels").fail("need at least two panels");
  return {"", "flux-roundtrip", 0, [=](ScenarioRun& run) {
            DMField back = field_from_flux(flux_from_field(f), f.window, so);
            auto dict = bump_dictionary(f.window);
            for (int j = 0; j < 2; ++j)
              run.check("component " + std::to_string(j + 1) + " dictionary distance",
                        dictionary_discrepancy(back.components[j], f.components[j], dict), 0.0, tol,
                        Compare::at_most, prov);
          }};
}

Planned plan_balance(const Json& s, const Context& ctx, const std::string& prov) {
  DMField f = io::field(need(s, "field", ctx), ctx.at("field"));
  if (!f.analytic()) ctx.at("field").fail("the balance law needs a stored divergence");
  const Json& sets = need(s, "sets", ctx);
  if (!sets.is_array() || sets.empty()) ctx.at("sets").fail("expected a non-empty array of sets");
  std::vector<OpenSet> us;
  for (std::size_t i = 0; i < sets.size(); ++i) us.push_back(io::set(sets[i], f.window, ctx.at("sets").at(i)));
  double tol = tolerance(s, ctx);
  return {"", "balance", 0, [=](ScenarioRun& run) {
            CauchyFlux flux = flux_from_field(f);
            for (std::size_t i = 0; i < us.size(); ++i)
              run.check("balance " + us[i].kind() + "#" + std::to_string(i), balance_residual(flux, f, us[i]), 0.0, tol,
                        Compare::at_most, prov);
          }};
}

Planned plan_solve(const Json& s, const Context& ctx, const std::string& prov) {
  Box w = io::box(need(s, "window", ctx), ctx.at("window"));
  RadonMeasure sigma = io::measure(need(s, "sigma", ctx), w, ctx.at("sigma"));
  double tol = tolerance(s, ctx);
  std::vector<Vec2> pts;
  std::function<Vec2(const Vec2&)> ref;
  if (s.contains("reference")) {
    Json r = s["reference"];
    Context cr = ctx.at("reference");
    DMField rf = io::field(r, cr);
    ref = [rf](const Vec2& x) { return rf.ac_value(x); };
    const Json& p = need(s, "points", ctx);
    for (std::size_t i = 0; i < p.size(); ++i) pts.push_back(io::point(p[i], ctx.at("points").at(i)));
    if (pts.empty()) ctx.at("points").fail("expected sample points");
  }
  return {"", "solve-div", 0, [=](ScenarioRun& run) {
            DMField f = solve_div({sigma});
            run.check("verify residual", verify_solution(f, sigma), 0.0, tol, Compare::at_most, prov);
            if (ref) {
              double worst = 0.0;
              for (const Vec2& x : pts) worst = std::max(worst, norm(f.ac_value(x) - ref(x)));
              run.check("pointwise difference from reference", worst, 0.0, tol, Compare::at_most, prov);
            }
          }};
}

Planned plan_entropy(const Json& s, const Context& ctx, const std::string& prov) {
  PiecewiseSolution sol = io::solution(need(s, "solution", ctx), ctx.at("solution"));
  EntropyPair pair = s.contains("pair") ? io::entropy_pair(s["pair"], sol.flux, ctx.at("pair"))
                                        : EntropyPair::burgers_energy();
  double tol = tolerance(s, ctx);
  std::vector<std::pair<Box, double>> boxes;
  if (s.contains("boxes")) {
    const Json& b = s["boxes"];
    for (std::size_t i = 0; i < b.size(); ++i) {
      Context cb = ctx.at("boxes").at(i);
      boxes.push_back({io::box(need(b[i], "box", cb), cb.at("box")), io::scalar(need(b[i], "expected", cb), cb.at("expected"))});
    }
  }
  bool nonneg = s.value("nonnegative", false);
  bool residuals = s.value("residuals", true);
  return {"", "entropy", 0, [=](ScenarioRun& run) {
            if (residuals) {
              run.check("Rankine-Hugoniot residual", sol.rankine_hugoniot_residual(), 0.0, tol, Compare::at_most, prov);
              run.check("smooth-region residual", sol.pde_residual(), 0.0, tol, Compare::at_most, prov);
            }
            EntropyProduction ep = entropy_production_mollified(sol, pair);
            for (std::size_t i = 0; i < boxes.size(); ++i) {
              LimitValue v = ep.on_box(boxes[i].first);
              run.check("production on box#" + std::to_string(i), v.value, boxes[i].second, tol,
                        Compare::absolute, prov)
                  .ladder = ladder_rows(v);
            }
            if (nonneg) run.check("minimum over bumps", ep.min_value(), 0.0, tol, Compare::at_least, prov);
          }};
}

Planned plan_scenario(const Json& s, const Context& ctx, const RunOptions& opt) {
  std::string name = s.contains("name") && s["name"].is_string() ? s["name"].get<std::string>() : "";
  if (name.empty()) ctx.at("name").fail("scenario needs a non-empty name");
  const Json& k = need(s, "kind", ctx);
  if (!k.is_string()) ctx.at("kind").fail("expected a string");
  std::string kind = k.get<std::string>();
  std::uint64_t seed = opt.seed;
  if (s.contains("seed")) {
    double v = io::number(s["seed"], ctx.at("seed"));
    if (v < 0) ctx.at("seed").fail("seed must be non-negative");
    seed = static_cast<std::uint64_t>(v);
  }
  std::string prov = s.contains("provenance") ? s["provenance"].get<std::string>() : "unspecified";
  Planned p;
  if (kind == "trace") p = plan_trace(s, ctx, prov);
  else if (kind == "coarea") p = plan_coarea(s, ctx, prov);
  else if (kind == "jump") p = plan_jump(s, ctx, prov);
  else if (kind == "flux-roundtrip") p = plan_roundtrip(s, ctx, prov);
  else if (kind == "balance") p = plan_balance(s, ctx, prov);
  else if (kind == "solve-div") p = plan_solve(s, ctx, prov);
  else if (kind == "entropy") p = plan_entropy(s, ctx, prov);
  else if (kind == "example-gallery") {
    const Json& g = need(s, "scenario", ctx);
    if (!g.is_string()) ctx.at("scenario").fail("expected a gallery scenario name");
    const GalleryEntry* e = nullptr;
    try {
      e = &find_entry(g.get<std::string>());
    } catch (const ConfigError& err) {
      ctx.at("scenario").fail(err.what());
    }
    double scale = 1.0;
    if (s.contains("tolerance")) {
      scale = io::scalar(s["tolerance"], ctx.at("tolerance"));
      if (!(scale > 0)) ctx.at("tolerance").fail("tolerance (a scale for gallery scenarios) must be positive");
    }
    auto fn = e->run;
    // gallery rows carry their own tolerances; the scenario's tolerance scales them
    p.run = [fn, scale, name, kind, seed, opt](ScenarioRun& run) {
      RunOptions o = opt;
      o.tolerance_scale *= scale;
      ScenarioRun inner(name, kind, o, seed);
      fn(inner);
      run = std::move(inner);
    };
    p.name = name;
    p.kind = kind;
    p.seed = seed;
    return p;
  } else {
    ctx.at("kind").fail("unknown kind '" + kind +
                        "' (trace, coarea, jump, flux-roundtrip, balance, solve-div, entropy, example-gallery)");
  }
  p.name = name;
  p.kind = kind;
  p.seed = seed;
  return p;
}

}  // namespace

RunReport run_gallery(const std::vector<std::string>& names, const RunOptions& opt) {
  check_options(opt);
  std::vector<Planned> plan;
  if (names.empty()) {
    for (const auto& e : gallery_entries()) plan.push_back({e.name, "example-gallery", opt.seed, e.run});
  } else {
    for (const auto& n : names) {
      const auto& e = find_entry(n);
      plan.push_back({e.name, "example-gallery", opt.seed, e.run});
    }
  }
  return execute(plan, opt);
}

RunReport run_file(const fs::path& file, const RunOptions& opt) {
  check_options(opt);
  Context ctx;
  ctx.file = file;
  ctx.search = opt.search;
  Json root = io::read_file(file);
  std::vector<std::pair<Json, Context>> items;
  auto add_all = [&](const Json& list, const Context& c) {
    if (!list.is_array()) c.fail("expected an array of scenarios");
    for (std::size_t i = 0; i < list.size(); ++i) items.emplace_back(list[i], c.at(i));
  };
  if (root.is_array()) add_all(root, ctx);
  else if (root.is_object() && root.contains("scenarios")) add_all(root["scenarios"], ctx.at("scenarios"));
  else if (root.is_object()) items.emplace_back(root, ctx);
  else ctx.fail("expected a scenario object, an array of scenarios or {\"scenarios\": [...]}");
  std::vector<Planned> plan;
  for (const auto& [s, c] : items) {
    try {
      plan.push_back(plan_scenario(s, c, opt));
    } catch (const nlohmann::json::exception& e) {
      c.fail(std::string("malformed value: ") + e.what());
    }
  }
  return execute(plan, opt);
}

namespace {

Json number_json(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

const char* compare_name(Compare c) {
  switch (c) {
    case Compare::absolute: return "absolute";
    case Compare::relative: return "relative";
    case Compare::at_most: return "at_most";
    case Compare::at_least: return "at_least";
  }
  return "";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_json(const RunReport& r) {
  Json root;
  root["pass"] = r.passed();
  root["failing"] = r.failing();
  Json scen = Json::array();
  for (const auto& s : r.scenarios) {
    Json js;
    js["name"] = s.name;
    js["kind"] = s.kind;
    js["pass"] = s.passed();
    if (!s.error.empty()) js["error"] = s.error;
    Json rows = Json::array();
    for (const auto& row : s.rows) {
      Json jr;
      jr["check"] = row.label;
      jr["pass"] = row.pass;
      jr["value"] = number_json(row.value);
      jr["expected"] = number_json(row.expected);
      jr["tolerance"] = row.tolerance;
      jr["compare"] = compare_name(row.compare);
      jr["provenance"] = row.provenance;
      Json lad = Json::array();
      for (const auto& l : row.ladder)
        lad.push_back({number_json(std::isnan(l.eps) ? l.delta : l.eps), number_json(l.raw)});
      jr["ladder"] = lad;
      if (!row.ladder.empty()) {
        jr["ladder_variable"] = std::isnan(row.ladder.front().eps) ? "delta" : "eps";
        jr["extrapolated"] = number_json(row.ladder.back().extrapolated);
      }
      rows.push_back(jr);
    }
    js["rows"] = rows;
    scen.push_back(js);
  }
  root["scenarios"] = scen;
  return root.dump(2) + "\n";
}

std::string table_csv(const RunReport& r) {
  std::string out = "scenario,check,eps,delta,raw,extrapolated\n";
  for (const auto& s : r.scenarios)
    for (const auto& row : s.rows)
      for (const auto& l : row.ladder)
        out += csv_text(s.name) + "," + csv_text(row.label) + "," + csv_number(l.eps) + "," + csv_number(l.delta) + "," +
               csv_number(l.raw) + "," + csv_number(l.extrapolated) + "\n";
  return out;
}

void write_report(const RunReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream(dir / "report.json") << report_json(r);
  std::ofstream(dir / "table.csv") << table_csv(r);
}

void solve_div_file(const fs::path& sigma_file, const fs::path& out, const RunOptions& opt, int samples) {
  Context ctx;
  ctx.file = sigma_file;
  ctx.search = opt.search;
  Json j = io::read_file(sigma_file);
  Json desc = j.contains("sigma") ? j["sigma"] : j;
  Context cd = j.contains("sigma") ? ctx.at("sigma") : ctx;
  if (!j.contains("window") && !desc.contains("box")) ctx.fail("missing field 'window' (or a 'box' in the measure)");
  Box w = j.contains("window") ? io::box(j["window"], ctx.at("window")) : io::box(desc["box"], cd.at("box"));
  RadonMeasure sigma = io::measure(desc, w, cd);
  DMField f = solve_div({sigma});
  Json res = io::newtonian_json(desc, w, f, samples);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream o(out);
  if (!o) throw ConfigError(out.string() + ": cannot write");
  o << res.dump(2) << "\n";
}

std::vector<fs::path> data_path_from_env() {
  std::vector<fs::path> out;
  const char* v = std::getenv("DMFIELD_DATA");
  if (!v) return out;
  std::string s = v;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(':', start);
    if (end == std::string::npos) end = s.size();
    if (end > start) out.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace dmf
