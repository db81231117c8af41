#include "dmfield/entropy.hpp"

#include <limits>
#include <memory>

namespace dmf {

namespace {

std::vector<Vec2> ccw(std::vector<Vec2> p) {
  if (polygon_area(p) < 0) std::reverse(p.begin(), p.end());
  return p;
}

bool inside_convex(const std::vector<Vec2>& p, const Vec2& x) {
  const double tol = 1e-13;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Vec2 a = p[i], b = p[(i + 1) % p.size()];
    if (cross(b - a, x - a) < -tol * (1.0 + norm(b - a))) return false;
  }
  return true;
}

double speed_of(const Vec2& a, const Vec2& b) {
  if (b.x <= a.x) throw ConfigError("shock curve must have strictly increasing t");
  return (b.y - a.y) / (b.x - a.x);
}

// (xdot [eta] - [q]) at time t on segment (a, b) of the shock.
double divergence_density(const Shock& s, const EntropyPair& pair, double xdot, double t) {
  double ul = s.left(t), ur = s.right(t);
  return xdot * (pair.eta(ul) - pair.eta(ur)) - (pair.q(ul) - pair.q(ur));
}

CurvePart shock_part(const Shock& s, const EntropyPair& pair, double scale) {
  if (s.curve.size() < 2) throw ConfigError("shock curve needs at least two points");
  auto pts = std::make_shared<std::vector<Vec2>>(s.curve);
  int m = static_cast<int>(pts->size()) - 1;
  for (int i = 0; i < m; ++i) speed_of((*pts)[i], (*pts)[i + 1]);
  auto locate = [pts, m](double tau, int& i, double& w) {
    double v = std::clamp(tau, 0.0, 1.0) * m;
    i = std::min(static_cast<int>(v), m - 1);
    w = v - i;
  };
  CurvePart c;
  c.gamma = [pts, locate](double tau) {
    int i;
    double w;
    locate(tau, i, w);
    return (*pts)[i] + ((*pts)[i + 1] - (*pts)[i]) * w;
  };
  c.dgamma = [pts, locate, m](double tau) {
    int i;
    double w;
    locate(tau, i, w);
    return ((*pts)[i + 1] - (*pts)[i]) * double(m);
  };
  Shock sh = s;
  c.weight = [pts, locate, m, sh, pair, scale](double tau) {
    int i;
    double w;
    locate(tau, i, w);
    Vec2 a = (*pts)[i], b = (*pts)[i + 1];
    double t = a.x + (b.x - a.x) * w;
    return scale * divergence_density(sh, pair, speed_of(a, b), t) * (b.x - a.x) * m;
  };
  for (int i = 1; i < m; ++i) c.breaks.push_back(double(i) / m);
  return c;
}

RadonMeasure shock_measure(const PiecewiseSolution& sol, const EntropyPair& pair, double scale) {
  RadonMeasure m(sol.window);
  for (const Shock& s : sol.shocks) m.add(shock_part(s, pair, scale));
  return m;
}

PairingOptions pairing_for(const Box& window, const Box& support) {
  double margin = std::min({support.lo.x - window.lo.x, window.hi.x - support.hi.x, support.lo.y - window.lo.y,
                            window.hi.y - support.hi.y});
  if (margin <= 0) throw PreconditionError("entropy production: test support must lie inside the window");
  PairingOptions opt;
  // phi * rho_delta - phi has an even expansion in delta
  opt.delta = LadderOptions{std::min(window.scale() / 16.0, 0.9 * margin), 0.5, 4, 2.0, 2.0, 4, 1e-9};
  opt.area.abs_tol = 1e-8;
  opt.area.rel_tol = 1e-8;
  return opt;
}

}  // namespace

ScalarFlux ScalarFlux::burgers() {
  return {[](double u) { return 0.5 * u * u; }, [](double u) { return u; }, "burgers"};
}

EntropyPair EntropyPair::identity(const ScalarFlux& f) {
  return {[](double u) { return u; }, [](double) { return 1.0; }, [](double) { return 0.0; }, f.f, f.df, "identity"};
}

EntropyPair EntropyPair::burgers_energy() {
  return {[](double u) { return 0.5 * u * u; },
          [](double u) { return u; },
          [](double) { return 1.0; },
          [](double u) { return u * u * u / 3.0; },
          [](double u) { return u * u; },
          "burgers-energy"};
}

PairCheck check_pair(const EntropyPair& pair, const ScalarFlux& flux, double lo, double hi, int n) {
  PairCheck c;
  c.min_convexity = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double s = lo + (hi - lo) * i / (n - 1.0);
    c.compatibility = std::max(c.compatibility, std::abs(pair.dq(s) - pair.deta(s) * flux.df(s)));
    c.min_convexity = std::min(c.min_convexity, pair.ddeta(s));
  }
  return c;
}

double PiecewiseSolution::state(const Vec2& p) const {
  for (const SolutionRegion& r : regions)
    if (inside_convex(ccw(r.polygon), p)) return r.u(p.x, p.y);
  throw PreconditionError("state: point outside every region");
}

double PiecewiseSolution::rankine_hugoniot_residual(int samples) const {
  double worst = 0.0;
  for (const Shock& s : shocks)
    for (std::size_t i = 0; i + 1 < s.curve.size(); ++i) {
      Vec2 a = s.curve[i], b = s.curve[i + 1];
      double xdot = speed_of(a, b);
      for (int k = 0; k < samples; ++k) {
        double t = a.x + (b.x - a.x) * (k + 0.5) / samples;
        double ul = s.left(t), ur = s.right(t);
        worst = std::max(worst, std::abs(xdot * (ul - ur) - (flux.f(ul) - flux.f(ur))));
      }
    }
  return worst;
}

double PiecewiseSolution::pde_residual(int samples) const {
  double worst = 0.0;
  const double h = 1e-4 * window.scale();
  for (const SolutionRegion& r : regions) {
    Vec2 c;
    for (const Vec2& v : r.polygon) c += v;
    c = c / double(r.polygon.size());
    // five-point stencils; samples stay well inside so corner singularities (fans) are avoided
    auto d5 = [h](const Fn1& g) { return (g(-2 * h) - 8 * g(-h) + 8 * g(h) - g(2 * h)) / (12 * h); };
    for (const Vec2& v : r.polygon)
      for (int k = 0; k < samples; ++k) {
        Vec2 p = c + (v - c) * (0.05 + 0.7 * k / std::max(1, samples - 1));
        double ut = d5([&](double e) { return r.u(p.x + e, p.y); });
        double fx = d5([&](double e) { return flux.f(r.u(p.x, p.y + e)); });
        worst = std::max(worst, std::abs(ut + fx));
      }
  }
  return worst;
}

void PiecewiseSolution::validate() const {
  double rh = rankine_hugoniot_residual();
  if (rh > 1e-10) throw PreconditionError("Rankine-Hugoniot residual " + std::to_string(rh) + " exceeds 1e-10");
  double pde = pde_residual();
  if (pde > 1e-8) throw PreconditionError("conservation law residual " + std::to_string(pde) + " exceeds 1e-8");
}

PiecewiseSolution PiecewiseSolution::burgers_riemann(double ul, double ur, double T, double a, double b) {
  PiecewiseSolution s;
  s.flux = ScalarFlux::burgers();
  s.window = Box({0.0, a}, {T, b});
  auto constant = [](double v) { return [v](double, double) { return v; }; };
  if (ul > ur) {
    double xdot = 0.5 * (ul + ur);
    double xs = xdot * T;
    if (xs <= a || xs >= b) throw ConfigError("burgers_riemann: the shock leaves the window");
    s.regions.push_back({{{0, a}, {T, a}, {T, xs}, {0, 0}}, constant(ul)});
    s.regions.push_back({{{0, 0}, {T, xs}, {T, b}, {0, b}}, constant(ur)});
    s.shocks.push_back({{{0, 0}, {T, xs}}, [ul](double) { return ul; }, [ur](double) { return ur; }});
  } else {
    double xl = ul * T, xr = ur * T;
    if (xl <= a || xr >= b) throw ConfigError("burgers_riemann: the fan leaves the window");
    s.regions.push_back({{{0, a}, {T, a}, {T, xl}, {0, 0}}, constant(ul)});
    s.regions.push_back({{{0, 0}, {T, xl}, {T, xr}}, [](double t, double x) { return x / t; }});
    s.regions.push_back({{{0, 0}, {T, xr}, {T, b}, {0, b}}, constant(ur)});
  }
  return s;
}

DMField spacetime_field(const PiecewiseSolution& sol, const EntropyPair& pair) {
  DMField f;
  f.window = sol.window;
  f.name = "entropy-" + pair.name;
  for (int j = 0; j < 2; ++j) {
    RadonMeasure m(sol.window);
    Fn1 g = j == 0 ? pair.eta : pair.q;
    for (const SolutionRegion& r : sol.regions) {
      std::vector<Vec2> poly = ccw(r.polygon);
      AcPart p;
      auto u = r.u;
      p.density = [g, u](const Vec2& x) { return g(u(x.x, x.y)); };
      p.cells = polygon_patches(poly);
      p.domain.push_back([poly](const Vec2& x) { return inside_convex(poly, x); });
      p.polygons.push_back(poly);
      m.add(std::move(p));
    }
    f.components.push_back(std::move(m));
  }
  f.divergence = shock_measure(sol, pair, 1.0);
  return f;
}

RadonMeasure entropy_production(const PiecewiseSolution& sol, const EntropyPair& pair) {
  return shock_measure(sol, pair, -1.0);
}

LimitValue EntropyProduction::evaluate(const TestFunction& phi) const {
  LimitValue v = divergence_pairing_mollified(field, phi, pairing_for(field.window, phi.support));
  v.value = -v.value;
  return v;
}

LimitValue EntropyProduction::on_box(const Box& s) const {
  LimitValue v = mollified_divergence_box(field, s, pairing_for(field.window, s));
  v.value = -v.value;
  return v;
}

double EntropyProduction::discrepancy(const std::vector<TestFunction>& dict) const {
  const std::vector<TestFunction> local = dict.empty() ? bump_dictionary(field.window) : dict;
  double worst = 0.0;
  for (const TestFunction& phi : local) worst = std::max(worst, std::abs(evaluate(phi).value - integrate(analytic, phi)));
  return worst;
}

double EntropyProduction::min_value(const std::vector<TestFunction>& dict) const {
  const std::vector<TestFunction> local = dict.empty() ? bump_dictionary(field.window) : dict;
  double best = std::numeric_limits<double>::infinity();
  for (const TestFunction& phi : local) best = std::min(best, evaluate(phi).value);
  return best;
}

EntropyProduction entropy_production_mollified(const PiecewiseSolution& sol, const EntropyPair& pair) {
  EntropyProduction e;
  e.analytic = entropy_production(sol, pair);
  e.field = spacetime_field(sol, pair);
  e.field.divergence.reset();
  return e;
}

ShockJump shock_trace_jump(const PiecewiseSolution& sol, const EntropyPair& pair, std::size_t shock,
                           const TestFunction& phi, double width, const TraceOptions& opt) {
  if (shock >= sol.shocks.size()) throw ConfigError("shock_trace_jump: no such shock");
  const Shock& s = sol.shocks[shock];
  DMField g = spacetime_field(sol, pair);
  std::vector<Vec2> strip = s.curve;
  for (auto it = s.curve.rbegin(); it != s.curve.rend(); ++it) strip.push_back(*it - Vec2{0.0, width});
  OpenSet u = OpenSet::polygon(strip);
  JumpResult j = jump(g, u, phi, opt);
  ShockJump r;
  r.value = j.value;
  r.open_trace = j.open_trace;
  r.closed_trace = j.closed_trace;
  for (std::size_t i = 0; i + 1 < s.curve.size(); ++i) {
    Vec2 a = s.curve[i], b = s.curve[i + 1];
    double xdot = speed_of(a, b);
    double len = norm(b - a);
    r.expected += integrate_1d(
        [&](double w) {
          Vec2 p = a + (b - a) * w;
          return phi(p) * divergence_density(s, pair, xdot, p.x) / std::sqrt(1.0 + xdot * xdot) * len;
        },
        0.0, 1.0);
  }
  return r;
}

CauchyFlux cauchy_entropy_flux(const PiecewiseSolution& sol, const EntropyPair& pair) {
  CauchyFlux c = flux_from_field(spacetime_field(sol, pair));
  return CauchyFlux([c](const OpenSet& u, const Portion& s) { return c(u, s); }, c.sigma(), c.mu(),
                    "entropy-" + pair.name);
}

}  // namespace dmf
