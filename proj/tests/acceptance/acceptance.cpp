// One line per acceptance criterion; exits non-zero when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "dmfield/cauchyflux.hpp"
#include "dmfield/entropy.hpp"
#include "dmfield/poisson.hpp"
#include "dmfield/runner.hpp"

using namespace dmf;

namespace {

int failures = 0;

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

void report(int id, bool pass, const std::string& what) {
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[320];
  std::snprintf(buf, sizeof buf, f, static_cast<double>(args)...);
  return buf;
}

// composite Simpson, n even
double simpson(const std::function<double(double)>& g, double a, double b, int n = 2000) {
  double h = (b - a) / n, s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * g(a + i * h);
  return s * h / 3;
}

DMField whitney(const Box& w) {
  return DMField::from_density(w, [](const Vec2& x) { return x / dot(x, x); }, RadonMeasure::dirac(w, {0, 0}, 2 * kPi),
                               {{0, 0}});
}

DMField line_field(const Box& w, Vec2 a, Vec2 b) {
  DMField f;
  f.window = w;
  RadonMeasure f1(w);
  f1.add(CurvePart::segment(a, b, [](double) { return 1.0; }));
  f.components = {f1, RadonMeasure::zero(w)};
  RadonMeasure dv(w);
  dv.add(Atom{a, 1.0});
  dv.add(Atom{b, -1.0});
  f.divergence = dv;
  return f;
}

Vec2 polynomial(const Vec2& x) { return {x.x * x.x * x.y + x.y * x.y * x.y, x.x * x.y * x.y - x.x}; }

void whitney_divergence() {
  Clock c;
  Box w({-1, -1}, {1, 1});
  DMField f = DMField::from_density(w, [](const Vec2& x) { return x / dot(x, x); }, std::nullopt, {{0, 0}});
  TestFunction phi = TestFunction::bump({0, 0}, 0.5);
  double v = divergence_pairing(f, phi).value / phi({0, 0});
  double rel = std::abs(v / (2 * kPi) - 1), t = c.seconds();
  report(1, rel <= 1e-2 && t < 10, fmt("Whitney <div F, bump>/bump(0) = %.6f vs 2pi, rel err %.2e (tol 1e-2), %.1f s (limit 10 s)", v, rel, t));
}

void halfspace_trace() {
  Clock c;
  Box w({-1, -1}, {1, 1});
  DMField f = whitney(w);
  TraceOptions to;
  to.convention = Convention::outward;
  double worst = 0, flip = 0;
  OpenSet h = OpenSet::halfplane({1, 0}, 0, w);
  for (const TestFunction& phi : {TestFunction::bump({0, 0}, 0.5), TestFunction::bump({0.1, 0.2}, 0.6),
                                  TestFunction::bump({0, -0.1}, 0.4, 2.0)}) {
    double expected = -kPi * phi({0, 0});
    double out = trace_limit(f, h, phi, to).value;
    worst = std::max(worst, std::abs(out / expected - 1));
    // the interior-normal trace is the exact negation
    flip = std::max(flip, std::abs(trace_limit(f, h, phi).value + out));
  }
  double t = c.seconds();
  report(2, worst <= 1e-2 && flip <= 1e-12 && t < 30,
         fmt("half-space trace vs -pi phi(0), worst rel err %.2e over 3 bumps (tol 1e-2), interior + outward %.1e, %.1f s (limit 30 s)",
             worst, flip, t));
}

void cube_corner() {
  Box w({-1, -1}, {2, 2});
  DMField f = whitney(w);
  OpenSet q = OpenSet::box(Box({0, 0}, {1, 1}));
  TraceOptions to;
  to.convention = Convention::outward;
  double atom = corner_atom(f, q, {0, 0}, 0.1, to).value;
  double smooth = classical_flux(f, q, nullptr, 0.0, nullptr, to);
  // flux of x/|x|^2 through the two far edges: 2 * int_0^1 dy / (1 + y^2) = pi/2
  double far = 2 * simpson([](double y) { return 1 / (1 + y * y); }, 0, 1);
  double ea = std::abs(atom / (-kPi / 2) - 1), es = std::abs(smooth / far - 1);
  double flip = std::abs(corner_atom(f, q, {0, 0}, 0.1).value + atom);
  report(3, ea <= 2e-2 && es <= 2e-2 && flip <= 1e-12,
         fmt("corner atom %.5f vs -pi/2 (rel %.2e), smooth part %.5f vs pi/2 (rel %.2e), tol 2e-2; interior atom + outward %.1e",
             atom, ea, smooth, es, flip));
}

void shell_constant() {
  Box w({-1, -1}, {2, 2});
  DMField f = whitney(w);
  TestFunction d = distance_function(OpenSet::box(Box({0, 0}, {1, 1})));
  const double e = 0.025;
  MeasureDomain dom;
  dom.cells = {Patch::triangle({0, 0}, {e, e}, {0, e})};
  dom.contains = [](const Vec2&) { return true; };
  double v = pairing_over(f, d, nullptr, dom, {}, true).value / e;
  double err = std::abs(v - 0.5 * std::log(2.0));
  report(4, err <= 1e-3, fmt("(1/eps) int |grad d . F| at eps 0.025 = %.6f vs log(2)/2, err %.2e (tol 1e-3)", v, err));
}

void line_jump() {
  Clock c;
  Box w({-1, -1}, {2, 1});
  DMField f = line_field(w, {-1, 0}, {2, 0});
  OpenSet q = OpenSet::box(Box({0, 0}, {1, 1}));
  double worst_in = 0, worst_out = 0;
  for (const TestFunction& phi :
       {TestFunction::bump({1, 0}, 0.7), TestFunction::bump({0.2, 0.1}, 0.5, 2.0), TestFunction::linear({1, 2}, 0.5, w)}) {
    worst_in = std::max(worst_in, std::abs(trace_functional(f, q, phi).value));
    worst_out = std::max(worst_out, std::abs(exterior_trace(f, q, phi).value - (phi({1, 0}) - phi({0, 0}))));
  }
  double t = c.seconds();
  report(5, worst_in <= 1e-8 && worst_out <= 1e-8 && t < 5,
         fmt("interior |trace| %.2e, exterior err %.2e over 3 test functions (tol 1e-8), %.2f s (limit 5 s)", worst_in,
             worst_out, t));
}

void slit_disk() {
  Box w({-1.5, -1.5}, {1.5, 1.5});
  DMField f = DMField::from_density(w, [](const Vec2&) { return Vec2{0, 1}; }, RadonMeasure::zero(w));
  TestFunction phi = TestFunction::bump({0.5, 0}, 0.3);
  double segment = simpson([&](double x) { return phi({x, 0}); }, 0.2, 0.8);
  double eh = std::abs(trace_functional(f, OpenSet::halfdisk({0, 0}, 1), phi).value - segment);
  double es = std::abs(trace_functional(f, OpenSet::slitdisk({0, 0}, 1), phi).value);
  report(6, eh <= 1e-6 && es <= 1e-6,
         fmt("half-disk trace vs segment integral err %.2e, slit-disk |trace| %.2e (tol 1e-6)", eh, es));
}

void gauss_green() {
  Box w({-1.5, -1.5}, {1.5, 1.5});
  DMField f = DMField::from_density(w, polynomial, RadonMeasure::lebesgue(w, [](const Vec2& x) { return 4 * x.x * x.y; }));
  double worst = 0;
  for (const TestFunction& phi : {TestFunction::constant(1, w), TestFunction::linear({0.3, -0.7}, 1.2, w)}) {
    // interior-normal boundary integrals: periodic trapezoid on the circle, Simpson on the box edges
    Vec2 c{0.1, 0.2};
    const double r = 0.9;
    const int n = 512;
    double ball = 0;
    for (int i = 0; i < n; ++i) {
      double th = 2 * kPi * i / n;
      Vec2 nu{std::cos(th), std::sin(th)}, x = c + nu * r;
      ball -= phi(x) * dot(polynomial(x), nu) * r * 2 * kPi / n;
    }
    const double x0 = -0.7, x1 = 0.8, y0 = -0.4, y1 = 1.1;
    double box = simpson([&](double y) { return phi({x0, y}) * polynomial({x0, y}).x - phi({x1, y}) * polynomial({x1, y}).x; }, y0, y1) +
                 simpson([&](double x) { return phi({x, y0}) * polynomial({x, y0}).y - phi({x, y1}) * polynomial({x, y1}).y; }, x0, x1);
    worst = std::max(worst, std::abs(trace_functional(f, OpenSet::ball(c, r), phi).value - ball));
    worst = std::max(worst, std::abs(trace_functional(f, OpenSet::box(Box({x0, y0}, {x1, y1})), phi).value - box));
  }
  report(7, worst <= 1e-8, fmt("trace vs surface quadrature on ball and box, worst err %.2e (tol 1e-8)", worst));
}

void coarea() {
  Box w({-1, -1}, {1, 1});
  DMField s = DMField::from_density(w, [](const Vec2& x) { return Vec2{x.x * x.y, x.y * x.y - x.x}; },
                                    RadonMeasure::lebesgue(w, [](const Vec2& x) { return 3 * x.y; }));
  DMField rot = DMField::from_density(w, [](const Vec2& x) { return Vec2{-x.y, x.x}; }, RadonMeasure::zero(w));
  DMField wh = whitney(w);
  double worst = 0;
  worst = std::max(worst, coarea_check(s, OpenSet::ball({0.1, 0}, 0.7), TestFunction::bump({0.2, 0.1}, 0.6)).residual);
  worst = std::max(worst, coarea_check(s, OpenSet::box(Box({-0.6, -0.5}, {0.7, 0.4})), TestFunction::bump({0, 0}, 0.8)).residual);
  worst = std::max(worst, coarea_check(rot, OpenSet::polygon({{-0.5, -0.5}, {0.6, -0.4}, {0.2, 0.7}}),
                                       TestFunction::bump({0, 0}, 0.9)).residual);
  worst = std::max(worst, coarea_check(s, OpenSet::halfdisk({0, 0}, 0.8), TestFunction::linear({0.5, 1}, 0.3, w)).residual);
  worst = std::max(worst, coarea_check(wh, OpenSet::box(Box({0.2, 0.1}, {0.8, 0.7})), TestFunction::bump({0.5, 0.4}, 0.5)).residual);
  report(8, worst <= 1e-4, fmt("coarea residual over 5 scenarios, worst %.2e (tol 1e-4)", worst));
}

void balance() {
  Box w({-1, -1}, {1, 1});
  std::vector<DMField> fields{
      DMField::from_density(w, [](const Vec2& x) { return Vec2{x.x * x.y, x.y * x.y - x.x}; },
                            RadonMeasure::lebesgue(w, [](const Vec2& x) { return 3 * x.y; })),
      DMField::from_density(w, [](const Vec2& x) { return Vec2{-x.y, x.x}; }, RadonMeasure::zero(w)),
      line_field(w, {-1, 0.05}, {1, 0.05})};
  std::vector<OpenSet> shapes{OpenSet::box(Box({-0.5, -0.4}, {0.6, 0.5})), OpenSet::ball({0.1, -0.1}, 0.6),
                              OpenSet::polygon({{-0.6, -0.5}, {0.7, -0.3}, {0.1, 0.6}}),
                              OpenSet::halfdisk({0, 0}, 0.7, 0.3), OpenSet::box(Box({0.2, 0.1}, {0.8, 0.7}))};
  double worst = 0;
  int combos = 0;
  for (const DMField& f : fields) {
    CauchyFlux flux = flux_from_field(f);
    for (const OpenSet& u : shapes) {
      worst = std::max(worst, balance_residual(flux, f, u));
      ++combos;
    }
  }
  DMField wh = whitney(w);
  for (const OpenSet& u : shapes) {
    // the atom at the origin lies inside exactly the shapes containing it
    double div = u.contains({0, 0}) ? 2 * kPi : 0.0;
    worst = std::max(worst, std::abs(trace_limit(wh, u, TestFunction::constant(1, w)).value + div));
    ++combos;
  }
  report(9, worst <= 1e-6 && combos >= 20, fmt("balance residual over %.0f field/shape pairs, worst %.2e (tol 1e-6)", combos, worst));
}

void roundtrip() {
  Clock c;
  Box w({-1, -1}, {1, 1});
  DMField s = DMField::from_density(w, [](const Vec2& x) { return Vec2{x.y, x.x}; }, RadonMeasure::zero(w));
  DMField line = line_field(Box({-1, -1}, {2, 1}), {-1, 0}, {2, 0});
  double worst = 0;
  for (const DMField* f : {&s, &line}) {
    DMField back = field_from_flux(flux_from_field(*f), f->window);
    auto dict = bump_dictionary(f->window);
    for (int j = 0; j < 2; ++j) worst = std::max(worst, dictionary_discrepancy(back.components[j], f->components[j], dict));
  }
  double t = c.seconds();
  report(10, worst <= 1e-3 && t < 120,
         fmt("flux round trip on the 25-bump dictionary, worst %.2e (tol 1e-3), %.1f s (limit 120 s)", worst, t));
}

void newtonian() {
  Box w({-1.5, -1.5}, {1.5, 1.5});
  RadonMeasure atom = RadonMeasure::dirac(w, {0, 0}, -2 * kPi);
  DMField f = solve_div({atom});
  double pointwise = 0;
  for (int i = 0; i < 10; ++i) {
    double r = 0.2 + 0.1 * i;
    Vec2 x{std::cos(i * 0.7) * r, std::sin(i * 0.7) * r};
    pointwise = std::max(pointwise, norm(f.ac_value(x) - x / dot(x, x)));
  }
  TestFunction b = TestFunction::bump({0.1, -0.2}, 0.6);
  RadonMeasure smooth = RadonMeasure::lebesgue(w, b.value);
  RadonMeasure mix = smooth + RadonMeasure::dirac(w, {0.5, 0.4}, 0.7);
  double residual = std::max({verify_solution(f, atom), verify_solution(solve_div({smooth}), smooth),
                              verify_solution(solve_div({mix}), mix)});
  report(11, pointwise <= 1e-6 && residual <= 1e-3,
         fmt("Whitney reproduction at 10 points err %.2e (tol 1e-6); atom/smooth/mixture residual %.2e (tol 1e-3)",
             pointwise, residual));
}

void entropy() {
  PiecewiseSolution sol = PiecewiseSolution::burgers_riemann(1, 0, 2, -1, 2);
  EntropyProduction ep = entropy_production_mollified(sol, EntropyPair::burgers_energy());
  // speed 1/2, [eta] = 1/2, [q] = 1/3: production (1/3 - 1/4) per unit time
  double oracle = 1.0 / 3 - 0.5 * 0.5;
  double box = ep.on_box(Box({0.5, -0.5}, {1.5, 1.5})).value;
  double weak = std::abs(entropy_production_mollified(sol, EntropyPair::identity(sol.flux)).on_box(Box({0.5, -0.5}, {1.5, 1.5})).value);
  double rh = sol.rankine_hugoniot_residual();
  auto dict = bump_dictionary(sol.window);
  dict.resize(10);
  double low = ep.min_value(dict);
  report(12, std::abs(box - oracle) <= 1e-3 && weak <= 1e-6 && rh <= 1e-6 && low >= -1e-9,
         fmt("sigma_eta on a unit of shock time %.6f vs 1/12 (tol 1e-3); weak RH %.1e, pointwise RH %.1e (tol 1e-6); min sigma_eta(phi) %.2e",
             box, weak, rh, low));
}

void properties() {
  Clock c;
  RunReport r = run_gallery({"property-suites"}, {});
  std::string detail;
  for (const CheckRow& row : r.scenarios.at(0).rows) detail += "; " + row.label + " " + fmt("%.0f", row.value);
  if (!r.scenarios[0].error.empty()) detail += "; error " + r.scenarios[0].error;
  report(13, r.passed(), "200 randomized cases per suite" + detail + fmt(" (%.0f s)", c.seconds()));
}

}  // namespace

int main() {
  void (*criteria[])() = {whitney_divergence, halfspace_trace, cube_corner, shell_constant, line_jump, slit_disk, gauss_green,
                          coarea, balance, roundtrip, newtonian, entropy, properties};
  int id = 0;
  for (auto* criterion : criteria) {
    ++id;
    try {
      criterion();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw ") + e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
