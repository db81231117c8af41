#include "dmfield/mollifier.hpp"

namespace dmf {

namespace {

double profile(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

double compute_constant(int dim) {
  Quad1DOptions o;
  o.abs_tol = 1e-16;
  o.rel_tol = 1e-15;
  if (dim == 1) return 1.0 / integrate_1d([](double x) { return profile(x * x); }, -1.0, 1.0, o);
  // int_{|x|<1} exp(-1/(1-|x|^2)) dx = 2 pi int_0^1 r exp(-1/(1-r^2)) dr
  double radial = integrate_1d([](double r) { return r * profile(r * r); }, 0.0, 1.0, o);
  return 1.0 / (2.0 * kPi * radial);
}

// Fixed rule for int g(z) rho(z) dz over the unit ball: Gauss in r, trapezoid in
// angle (spectral for the periodic integrand). Weights are renormalised to sum to one.
struct BallRule {
  std::vector<Vec2> z;
  std::vector<double> w;
};

const BallRule& ball_rule() {
  static const BallRule rule = [] {
    BallRule b;
    const GaussRule& g = gauss_legendre(14);
    const int m = 24;
    double total = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      double r = 0.5 * (g.nodes[i] + 1.0);
      double wr = 0.5 * g.weights[i] * r * profile(r * r);
      for (int k = 0; k < m; ++k) {
        double th = (k + 0.5) * 2.0 * kPi / m;
        b.z.push_back({r * std::cos(th), r * std::sin(th)});
        b.w.push_back(wr * 2.0 * kPi / m);
        total += b.w.back();
      }
    }
    for (double& x : b.w) x /= total;
    return b;
  }();
  return rule;
}

}  // namespace

double mollifier_constant(int dim) {
  static const double c1 = compute_constant(1);
  static const double c2 = compute_constant(2);
  return dim == 1 ? c1 : c2;
}

double mollifier(const Vec2& z, double delta, int dim) {
  if (dim == 1) {
    double y = z.x / delta;
    return mollifier_constant(1) * profile(y * y) / delta;
  }
  Vec2 y = z / delta;
  return mollifier_constant(2) * profile(dot(y, y)) / (delta * delta);
}

Vec2 mollifier_grad(const Vec2& z, double delta) {
  Vec2 y = z / delta;
  double r2 = dot(y, y);
  if (r2 >= 1.0) return {};
  double q = 1.0 - r2;
  double g = mollifier_constant(2) * profile(r2) * (-2.0 / (q * q));
  return y * (g / (delta * delta * delta));
}

std::vector<Patch> ball_cells(const Vec2& x, double delta) {
  // Split radially so the flat outer profile does not force deep refinement.
  std::vector<Patch> cells;
  const double radii[] = {0.0, 0.5, 0.8, 1.0};
  for (int i = 0; i < 3; ++i)
    for (int q = 0; q < 4; ++q)
      cells.push_back(Patch::polar(x, radii[i] * delta, radii[i + 1] * delta, q * 0.5 * kPi, (q + 1) * 0.5 * kPi));
  return cells;
}

double convolve(const ScalarFn& f, const Vec2& x, double delta, bool kinked) {
  if (!kinked) {
    const BallRule& r = ball_rule();
    double acc = 0.0;
    for (std::size_t i = 0; i < r.z.size(); ++i) acc += f(x + r.z[i] * delta) * r.w[i];
    return acc;
  }
  auto cells = ball_cells(x, delta);
  auto g = [&](const Vec2& y) { return f(y) * mollifier(x - y, delta); };
  Quad2DOptions o;
  o.abs_tol = 1e-11;
  o.max_depth = 7;
  return integrate_patches<double>(cells, g, o);
}

Vec2 mollified_gradient(const ScalarFn& phi, const Vec2& x, double delta) {
  // grad(phi * rho)(x) = int phi(y) grad rho(x - y) dy; the steep kernel needs the adaptive rule
  auto cells = ball_cells(x, delta);
  auto g = [&](const Vec2& y) { return mollifier_grad(x - y, delta) * phi(y); };
  Quad2DOptions o;
  o.abs_tol = 1e-10;
  o.max_depth = 7;
  return integrate_patches<Vec2>(cells, g, o);
}

Vec2 convolve_gradient(const VectorFn& grad, const Vec2& x, double delta) {
  const BallRule& r = ball_rule();
  Vec2 acc;
  for (std::size_t i = 0; i < r.z.size(); ++i) acc += grad(x + r.z[i] * delta) * r.w[i];
  return acc;
}

}  // namespace dmf
