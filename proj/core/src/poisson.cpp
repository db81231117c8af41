#include "dmfield/poisson.hpp"

#include <memory>

namespace dmf {

namespace {

constexpr double kAtomGuard = 1e-13;

Vec2 kernel(const Vec2& x, const Vec2& y) {
  Vec2 d = x - y;
  double r2 = dot(d, d);
  if (r2 == 0.0) return {};
  return d * (-1.0 / (2.0 * kPi * r2));
}

}  // namespace

Vec2 newtonian_field(const RadonMeasure& sigma, const Vec2& x, const PoissonOptions& opt) {
  Vec2 acc;
  for (const Atom& a : sigma.atoms()) {
    if (dist(a.x, x) < kAtomGuard) throw PreconditionError("newtonian field evaluated at an atom of sigma");
    acc += kernel(x, a.x) * a.w;
  }
  for (std::size_t i = 0; i < sigma.ac().size(); ++i) {
    const AcPart& p = sigma.ac()[i];
    std::vector<Patch> cells;
    std::vector<Patch> given = p.cells;
    if (given.empty()) given.push_back(Patch::rect(sigma.box()));
    for (const Patch& c : given) {
      if (c.base() != Patch::Base::identity || c.domain() != Patch::Domain::rect) {
        cells.push_back(c);
        continue;
      }
      Vec2 lo, hi;
      c.map(0.0, 0.0, lo);
      c.map(1.0, 1.0, hi);
      Box b(lo, hi);
      for (int a = 0; a < opt.grid; ++a)
        for (int k = 0; k < opt.grid; ++k)
          cells.push_back(Patch::rect(Box({b.lo.x + b.width() * a / opt.grid, b.lo.y + b.height() * k / opt.grid},
                                          {b.lo.x + b.width() * (a + 1) / opt.grid,
                                           b.lo.y + b.height() * (k + 1) / opt.grid})));
    }
    std::vector<Vec2> apices = p.singular;
    apices.push_back(x);
    cells = split_patches(std::move(cells), apices);
    auto g = [&](const Vec2& y) {
      for (const auto& ind : p.indicators)
        if (!ind(y)) return Vec2{};
      double w = p.density(y);
      return w == 0.0 ? Vec2{} : kernel(x, y) * w;
    };
    acc += integrate_patches_fixed<Vec2>(cells, g, opt.order);
  }
  for (const CurvePart& c : sigma.curves()) {
    Quad1DOptions q = opt.curve;
    q.breakpoints = c.breaks;
    double ex = integrate_1d([&](double t) { return kernel(x, c.gamma(t)).x * c.weight(t); }, c.t0, c.t1, q);
    double ey = integrate_1d([&](double t) { return kernel(x, c.gamma(t)).y * c.weight(t); }, c.t0, c.t1, q);
    acc += Vec2{ex, ey};
  }
  return acc;
}

DMField solve_div(const DivergenceProblem& p, const PoissonOptions& opt) {
  const RadonMeasure& sigma = p.sigma;
  if (sigma.dim() != 2) throw ConfigError("solve_div: only the planar problem is supported");
  std::vector<Vec2> singular;
  for (const Atom& a : sigma.atoms()) singular.push_back(a.x);
  // Both components query the same point in turn; remember the last convolution per thread.
  auto shared = std::make_shared<const RadonMeasure>(sigma);
  auto field = [shared, opt](const Vec2& x) {
    thread_local const void* owner = nullptr;
    thread_local Vec2 last_x, last_v;
    if (owner == shared.get() && last_x == x) return last_v;
    last_v = newtonian_field(*shared, x, opt);
    last_x = x;
    owner = shared.get();
    return last_v;
  };
  DMField f = DMField::from_density(sigma.box(), field, sigma * -1.0, singular);
  f.name = "newtonian";
  return f;
}

double verify_solution(const DMField& f, const RadonMeasure& sigma, const std::vector<TestFunction>& dict) {
  const std::vector<TestFunction> local = dict.empty() ? bump_dictionary(f.window) : dict;
  DMField sing = f;
  for (RadonMeasure& c : sing.components) {
    RadonMeasure s(c.box(), c.dim());
    for (const Atom& a : c.atoms()) s.add(a);
    for (const CurvePart& k : c.curves()) s.add(k);
    c = s;
  }
  std::vector<Vec2> apices = f.ac_singular_points();
  double worst = 0.0;
  for (const TestFunction& phi : local) {
    // Fixed composite rule for the absolutely continuous part: the convolution densities are
    // expensive and only accurate to roughly 1e-8, so adaptivity buys nothing.
    Box b = phi.support.intersect(f.window);
    double ac = 0.0;
    if (!b.empty()) {
      const int n = 6;
      std::vector<Patch> cells;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          cells.push_back(Patch::rect(Box({b.lo.x + b.width() * i / n, b.lo.y + b.height() * j / n},
                                          {b.lo.x + b.width() * (i + 1) / n, b.lo.y + b.height() * (j + 1) / n})));
      cells = split_patches(std::move(cells), apices);
      ac = integrate_patches_fixed<double>(
          cells,
          [&](const Vec2& x) {
            Vec2 g = phi.grad(x);
            return g.x == 0.0 && g.y == 0.0 ? 0.0 : dot(g, f.ac_value(x));
          },
          10);
    }
    double lhs = ac + grad_pairing(sing, phi);
    worst = std::max(worst, std::abs(lhs - integrate(sigma, phi)));
  }
  return worst;
}

}  // namespace dmf
