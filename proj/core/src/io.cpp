#include "io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dmfield/expression.hpp"
#include "dmfield/quadrature.hpp"

namespace dmf::io {

namespace fs = std::filesystem;

Context Context::at(const std::string& key) const {
  Context c = *this;
  c.pointer += "/" + key;
  return c;
}

Context Context::at(std::size_t index) const {
  Context c = *this;
  c.pointer += "/" + std::to_string(index);
  return c;
}

void Context::fail(const std::string& what) const {
  std::string where = file.empty() ? std::string("<inline>") : file.string();
  throw ConfigError(where + ": " + (pointer.empty() ? "/" : pointer) + ": " + what);
}

Json read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError(p.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(p.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

Json resolve(const Json& j, Context& ctx) {
  if (!j.is_string()) return j;
  fs::path ref = j.get<std::string>();
  std::vector<fs::path> tries;
  if (ref.is_absolute()) {
    tries.push_back(ref);
  } else {
    if (!ctx.file.empty()) tries.push_back(ctx.file.parent_path() / ref);
    for (const auto& d : ctx.search) tries.push_back(d / ref);
    tries.push_back(ref);
  }
  for (const auto& p : tries)
    if (fs::is_regular_file(p)) {
      ctx.file = p;
      ctx.pointer.clear();
      return read_file(p);
    }
  ctx.fail("descriptor file '" + ref.string() + "' not found");
}

namespace {

const Json& need(const Json& j, const char* key, const Context& ctx) {
  if (!j.is_object()) ctx.fail("expected an object");
  auto it = j.find(key);
  if (it == j.end()) ctx.fail(std::string("missing field '") + key + "'");
  return *it;
}

std::string text(const Json& j, const Context& ctx) {
  if (!j.is_string()) ctx.fail("expected a string");
  return j.get<std::string>();
}

Expr expr(const Json& j, const std::vector<std::string>& vars, const Context& ctx) {
  if (j.is_number()) return Expr::constant(j.get<double>());
  try {
    return Expr::parse(text(j, ctx), vars);
  } catch (const ConfigError& e) {
    ctx.fail(e.what());
  }
}

ScalarFn spatial(const Json& j, const Context& ctx) {
  Expr e = expr(j, {"x1", "x2"}, ctx);
  return [e](const Vec2& x) { return e.eval({x.x, x.y}); };
}

std::vector<Vec2> points(const Json& j, const Context& ctx) {
  if (!j.is_array()) ctx.fail("expected an array of points");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], ctx.at(i)));
  return out;
}

CurvePart curve(const Json& j, const Context& ctx) {
  std::string kind = text(need(j, "kind", ctx), ctx.at("kind"));
  CurvePart geom;
  if (kind == "segment") {
    geom = CurvePart::segment(point(need(j, "a", ctx), ctx.at("a")), point(need(j, "b", ctx), ctx.at("b")),
                              [](double) { return 1.0; });
  } else if (kind == "polyline") {
    auto pts = points(need(j, "points", ctx), ctx.at("points"));
    if (pts.size() < 2) ctx.at("points").fail("a polyline needs two points");
    geom = CurvePart::polyline(pts, [](double) { return 1.0; });
  } else if (kind == "circle") {
    double th0 = j.contains("th0") ? scalar(j["th0"], ctx.at("th0")) : 0.0;
    double th1 = j.contains("th1") ? scalar(j["th1"], ctx.at("th1")) : 2 * kPi;
    double r = scalar(need(j, "radius", ctx), ctx.at("radius"));
    if (!(r > 0)) ctx.at("radius").fail("radius must be positive");
    geom = CurvePart::arc(point(need(j, "center", ctx), ctx.at("center")), r, th0, th1, [](double) { return 1.0; });
  } else {
    ctx.at("kind").fail("unknown curve kind '" + kind + "' (segment, polyline, circle)");
  }
  if (!j.contains("density")) return geom;
  ScalarFn rho = spatial(j["density"], ctx.at("density"));
  CurvePart c = geom;
  auto g = geom.gamma;
  auto base = geom.weight;
  c.weight = [g, base, rho](double t) { return base(t) * rho(g(t)); };
  return c;
}

}  // namespace

double number(const Json& j, const Context& ctx) {
  if (!j.is_number()) ctx.fail("expected a number");
  return j.get<double>();
}

double scalar(const Json& j, const Context& ctx) {
  if (j.is_number()) return j.get<double>();
  Expr e = expr(j, {}, ctx);
  return e.eval({});
}

Vec2 point(const Json& j, const Context& ctx) {
  if (!j.is_array() || j.size() != 2) ctx.fail("expected a point [x1, x2]");
  return {scalar(j[0], ctx.at(0)), scalar(j[1], ctx.at(1))};
}

Box box(const Json& j, const Context& ctx) {
  if (!j.is_array() || j.size() != 2) ctx.fail("expected a box [[lo], [hi]]");
  Box b(point(j[0], ctx.at(0)), point(j[1], ctx.at(1)));
  if (b.empty()) ctx.fail("box has no interior");
  return b;
}

RadonMeasure measure(const Json& in, const Box& window, const Context& c0) {
  Context ctx = c0;
  Json j = resolve(in, ctx);
  if (!j.is_object()) ctx.fail("expected a measure descriptor object");
  Box w = j.contains("box") ? box(j["box"], ctx.at("box")) : window;
  RadonMeasure m(w);
  std::vector<Vec2> singular;
  if (j.contains("singular_points")) singular = points(j["singular_points"], ctx.at("singular_points"));
  if (j.contains("ac") && !(j["ac"].is_string() && j["ac"].get<std::string>() == "none")) {
    AcPart p;
    p.density = spatial(j["ac"], ctx.at("ac"));
    p.singular = singular;
    m.add(std::move(p));
  }
  if (j.contains("atoms")) {
    const Json& a = j["atoms"];
    Context ca = ctx.at("atoms");
    if (!a.is_array()) ca.fail("expected an array of atoms");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Json& e = a[i];
      Context ce = ca.at(i);
      if (e.is_array() && e.size() == 2 && e[0].is_array()) m.add(Atom{point(e[0], ce.at(0)), scalar(e[1], ce.at(1))});
      else if (e.is_array() && e.size() == 3) m.add(Atom{{scalar(e[0], ce.at(0)), scalar(e[1], ce.at(1))}, scalar(e[2], ce.at(2))});
      else ce.fail("expected [[x1, x2], w] or [x1, x2, w]");
    }
  }
  if (j.contains("curves")) {
    const Json& cs = j["curves"];
    if (!cs.is_array()) ctx.at("curves").fail("expected an array of curves");
    for (std::size_t i = 0; i < cs.size(); ++i) m.add(curve(cs[i], ctx.at("curves").at(i)));
  }
  return m;
}

DMField field(const Json& in, const Context& c0) {
  Context ctx = c0;
  Json j = resolve(in, ctx);
  if (!j.is_object()) ctx.fail("expected a field descriptor object");
  Box w = box(need(j, "window", ctx), ctx.at("window"));
  std::string div_mode = "given";
  if (j.contains("div") && j["div"].is_string()) {
    std::string m = j["div"].get<std::string>();
    if (m == "symbolic" || m == "approximate") div_mode = m;  // any other string names a measure file
  }
  DMField f;
  if (j.contains("builtin")) {
    std::string name = text(j["builtin"], ctx.at("builtin"));
    if (name != "whitney") ctx.at("builtin").fail("unknown builtin field '" + name + "' (whitney)");
    std::optional<RadonMeasure> div;
    if (div_mode != "approximate") div = RadonMeasure::dirac(w, {0, 0}, 2 * kPi);
    f = DMField::from_density(w, [](const Vec2& x) { return x / dot(x, x); }, div, {{0, 0}});
    f.name = "whitney";
  } else if (j.contains("density")) {
    const Json& d = j["density"];
    Context cd = ctx.at("density");
    if (!d.is_array() || d.size() != 2) cd.fail("expected two component expressions");
    Expr e1 = expr(d[0], {"x1", "x2"}, cd.at(0)), e2 = expr(d[1], {"x1", "x2"}, cd.at(1));
    std::vector<Vec2> singular;
    if (j.contains("singular_points")) singular = points(j["singular_points"], ctx.at("singular_points"));
    std::optional<RadonMeasure> div;
    if (div_mode == "symbolic" || (div_mode == "given" && !j.contains("div"))) {
      Expr dv1 = e1.derivative(0), dv2 = e2.derivative(1);
      div = RadonMeasure::lebesgue(w, [dv1, dv2](const Vec2& x) { return dv1.eval({x.x, x.y}) + dv2.eval({x.x, x.y}); });
    } else if (div_mode == "given") {
      div = measure(j["div"], w, ctx.at("div"));
    }
    f = DMField::from_density(w, [e1, e2](const Vec2& x) { return Vec2{e1.eval({x.x, x.y}), e2.eval({x.x, x.y})}; },
                              div, singular);
    f.name = "density";
  } else if (j.contains("line")) {
    // constant multiple of the unit tangent times H1 on [a, b]; div = rho (delta_a - delta_b)
    const Json& l = j["line"];
    Context cl = ctx.at("line");
    Vec2 a = point(need(l, "a", cl), cl.at("a")), b = point(need(l, "b", cl), cl.at("b"));
    double rho = l.contains("density") ? scalar(l["density"], cl.at("density")) : 1.0;
    if (!(dist(a, b) > 0)) cl.fail("degenerate segment");
    Vec2 tau = normalized(b - a);
    f.window = w;
    for (double c : {tau.x, tau.y}) {
      RadonMeasure m(w);
      if (c != 0.0) m.add(CurvePart::segment(a, b, [c, rho](double) { return c * rho; }));
      f.components.push_back(m);
    }
    if (div_mode != "approximate") {
      RadonMeasure dv(w);
      dv.add(Atom{a, rho});
      dv.add(Atom{b, -rho});
      f.divergence = dv;
    }
    RadonMeasure bound(w);
    bound.add(CurvePart::segment(a, b, [rho](double) { return std::abs(rho); }));
    f.mu_bound = bound;
    f.name = "line";
  } else if (j.contains("components")) {
    const Json& cs = j["components"];
    Context cc = ctx.at("components");
    if (!cs.is_array() || cs.size() != 2) cc.fail("expected two component measures");
    f.window = w;
    f.components = {measure(cs[0], w, cc.at(0)), measure(cs[1], w, cc.at(1))};
    if (div_mode == "given") f.divergence = measure(need(j, "div", ctx), w, ctx.at("div"));
    else if (div_mode == "symbolic") ctx.at("div").fail("symbolic divergence needs a density field");
    if (j.contains("bound")) f.mu_bound = measure(j["bound"], w, ctx.at("bound"));
    f.name = "measures";
  } else if (j.contains("newtonian")) {
    PoissonOptions po;
    f = solve_div({measure(j["newtonian"], w, ctx.at("newtonian"))}, po);
  } else {
    ctx.fail("field needs one of builtin, density, line, components, newtonian");
  }
  if (j.contains("name")) f.name = text(j["name"], ctx.at("name"));
  return f;
}

OpenSet set(const Json& in, const Box& window, const Context& c0) {
  Context ctx = c0;
  Json j = resolve(in, ctx);
  std::string kind = text(need(j, "kind", ctx), ctx.at("kind"));
  auto pt = [&](const char* k) { return point(need(j, k, ctx), ctx.at(k)); };
  auto positive = [&](const char* k) {
    double v = scalar(need(j, k, ctx), ctx.at(k));
    if (!(v > 0)) ctx.at(k).fail("must be positive");
    return v;
  };
  auto pair = [&]() {
    const Json& s = need(j, "sets", ctx);
    if (!s.is_array() || s.size() != 2) ctx.at("sets").fail("expected two sets");
    return std::make_pair(set(s[0], window, ctx.at("sets").at(0)), set(s[1], window, ctx.at("sets").at(1)));
  };
  if (kind == "box") return OpenSet::box(Box(pt("lo"), pt("hi")));
  if (kind == "ball") return OpenSet::ball(pt("center"), positive("radius"));
  if (kind == "halfspace") {
    Vec2 n = pt("normal");
    if (!(norm(n) > 0)) ctx.at("normal").fail("normal must be non-zero");
    double off = j.contains("offset") ? scalar(j["offset"], ctx.at("offset")) : 0.0;
    Box w = j.contains("window") ? box(j["window"], ctx.at("window")) : window;
    return OpenSet::halfplane(n, off, w);
  }
  if (kind == "halfdisk") {
    double a = j.contains("angle") ? scalar(j["angle"], ctx.at("angle")) : 0.0;
    return OpenSet::halfdisk(pt("center"), positive("radius"), a);
  }
  if (kind == "slitdisk") return OpenSet::slitdisk(pt("center"), positive("radius"));
  if (kind == "polygon") {
    auto v = points(need(j, "vertices", ctx), ctx.at("vertices"));
    if (v.size() < 3) ctx.at("vertices").fail("a polygon needs three vertices");
    return OpenSet::polygon(v);
  }
  if (kind == "intersect") {
    auto [a, b] = pair();
    return OpenSet::intersect(a, b);
  }
  if (kind == "union") {
    auto [a, b] = pair();
    return OpenSet::unite(a, b);
  }
  if (kind == "complement") {
    Box w = j.contains("window") ? box(j["window"], ctx.at("window")) : window;
    return OpenSet::complement(w, set(need(j, "set", ctx), window, ctx.at("set")));
  }
  ctx.at("kind").fail("unknown set kind '" + kind +
                      "' (box, ball, halfspace, halfdisk, slitdisk, polygon, intersect, union, complement)");
}

TestFunction test_function(const Json& in, const Box& window, const Context& c0) {
  Context ctx = c0;
  Json j = resolve(in, ctx);
  std::string kind = text(need(j, "kind", ctx), ctx.at("kind"));
  if (kind == "bump") {
    double r = scalar(need(j, "radius", ctx), ctx.at("radius"));
    if (!(r > 0)) ctx.at("radius").fail("must be positive");
    double h = j.contains("height") ? scalar(j["height"], ctx.at("height")) : 1.0;
    return TestFunction::bump(point(need(j, "center", ctx), ctx.at("center")), r, h);
  }
  if (kind == "constant")
    return TestFunction::constant(j.contains("value") ? scalar(j["value"], ctx.at("value")) : 1.0, window);
  if (kind == "linear")
    return TestFunction::linear(point(need(j, "a", ctx), ctx.at("a")),
                                j.contains("b") ? scalar(j["b"], ctx.at("b")) : 0.0, window);
  ctx.at("kind").fail("unknown test function kind '" + kind + "' (bump, constant, linear)");
}

PiecewiseSolution solution(const Json& in, const Context& c0) {
  Context ctx = c0;
  Json j = resolve(in, ctx);
  if (j.contains("riemann")) {
    const Json& r = j["riemann"];
    Context cr = ctx.at("riemann");
    auto get = [&](const char* k) { return scalar(need(r, k, cr), cr.at(k)); };
    double T = get("T"), a = get("a"), b = get("b");
    if (!(T > 0) || !(b > a)) cr.fail("need T > 0 and a < b");
    return PiecewiseSolution::burgers_riemann(get("ul"), get("ur"), T, a, b);
  }
  PiecewiseSolution s;
  std::string fl = j.contains("flux") ? text(j["flux"], ctx.at("flux")) : "burgers";
  if (fl == "burgers") {
    s.flux = ScalarFlux::burgers();
  } else {
    Expr f = expr(j["flux"], {"u"}, ctx.at("flux"));
    Expr df = f.derivative(0);
    s.flux = {[f](double u) { return f.eval({u}); }, [df](double u) { return df.eval({u}); }, fl};
  }
  s.window = box(need(j, "window", ctx), ctx.at("window"));
  const Json& rs = need(j, "regions", ctx);
  if (!rs.is_array() || rs.empty()) ctx.at("regions").fail("expected a non-empty array of regions");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    Context cr = ctx.at("regions").at(i);
    SolutionRegion reg;
    reg.polygon = points(need(rs[i], "polygon", cr), cr.at("polygon"));
    Expr u = expr(need(rs[i], "u", cr), {"t", "x"}, cr.at("u"));
    reg.u = [u](double t, double x) { return u.eval({t, x}); };
    s.regions.push_back(std::move(reg));
  }
  if (j.contains("shocks")) {
    const Json& ss = j["shocks"];
    for (std::size_t i = 0; i < ss.size(); ++i) {
      Context cs = ctx.at("shocks").at(i);
      Shock sh;
      sh.curve = points(need(ss[i], "curve", cs), cs.at("curve"));
      Expr l = expr(need(ss[i], "ul", cs), {"t"}, cs.at("ul")), r = expr(need(ss[i], "ur", cs), {"t"}, cs.at("ur"));
      sh.left = [l](double t) { return l.eval({t}); };
      sh.right = [r](double t) { return r.eval({t}); };
      s.shocks.push_back(std::move(sh));
    }
  }
  return s;
}

EntropyPair entropy_pair(const Json& j, const ScalarFlux& flux, const Context& ctx) {
  if (j.is_string()) {
    std::string n = j.get<std::string>();
    if (n == "burgers-energy") return EntropyPair::burgers_energy();
    if (n == "identity") return EntropyPair::identity(flux);
    ctx.fail("unknown entropy pair '" + n + "' (burgers-energy, identity)");
  }
  Expr eta = expr(need(j, "eta", ctx), {"u"}, ctx.at("eta")), q = expr(need(j, "q", ctx), {"u"}, ctx.at("q"));
  Expr deta = eta.derivative(0), ddeta = deta.derivative(0), dq = q.derivative(0);
  EntropyPair p;
  p.eta = [eta](double u) { return eta.eval({u}); };
  p.deta = [deta](double u) { return deta.eval({u}); };
  p.ddeta = [ddeta](double u) { return ddeta.eval({u}); };
  p.q = [q](double u) { return q.eval({u}); };
  p.dq = [dq](double u) { return dq.eval({u}); };
  p.name = j.contains("name") ? text(j["name"], ctx.at("name")) : "custom";
  return p;
}

double Expected::operator()(const TestFunction& phi) const {
  double v = constant;
  for (const auto& [x, c] : points) v += c * phi(x);
  for (const auto& [seg, c] : segments) {
    auto [a, b] = seg;
    double len = dist(a, b);
    v += c * len * integrate_1d([&](double s) { return phi(a + (b - a) * s); }, 0.0, 1.0, {1e-14, 1e-13, 30, 16, {}});
  }
  return v;
}

Expected expected(const Json& j, const Context& ctx) {
  Expected e;
  if (j.is_number() || j.is_string()) {
    e.constant = scalar(j, ctx);
    return e;
  }
  if (!j.is_object()) ctx.fail("expected a number or an object with constant/points/segments");
  if (j.contains("constant")) e.constant = scalar(j["constant"], ctx.at("constant"));
  if (j.contains("points")) {
    const Json& ps = j["points"];
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Context c = ctx.at("points").at(i);
      e.points.push_back({point(need(ps[i], "at", c), c.at("at")), scalar(need(ps[i], "coef", c), c.at("coef"))});
    }
  }
  if (j.contains("segments")) {
    const Json& ss = j["segments"];
    for (std::size_t i = 0; i < ss.size(); ++i) {
      Context c = ctx.at("segments").at(i);
      double coef = ss[i].contains("coef") ? scalar(ss[i]["coef"], c.at("coef")) : 1.0;
      e.segments.push_back({{point(need(ss[i], "a", c), c.at("a")), point(need(ss[i], "b", c), c.at("b"))}, coef});
    }
  }
  return e;
}

Json newtonian_json(const Json& sigma, const Box& window, const DMField& f, int samples) {
  Json out;
  out["window"] = {{window.lo.x, window.lo.y}, {window.hi.x, window.hi.y}};
  out["newtonian"] = sigma;
  Json rows = Json::array();
  auto sing = f.ac_singular_points();
  for (int i = 0; i < samples; ++i)
    for (int k = 0; k < samples; ++k) {
      Vec2 x{window.lo.x + window.width() * (i + 0.5) / samples, window.lo.y + window.height() * (k + 0.5) / samples};
      bool near = false;
      for (const Vec2& p : sing) near = near || dist(p, x) < 1e-9 * window.scale();
      if (near) continue;
      Vec2 v = f.ac_value(x);
      rows.push_back({x.x, x.y, v.x, v.y});
    }
  out["samples"] = rows;
  return out;
}

}  // namespace dmf::io
