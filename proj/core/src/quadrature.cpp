#include "dmfield/quadrature.hpp"

#include <map>
#include <mutex>

namespace dmf {

void throw_singular_node() { throw NumericalError("singular density at quadrature node"); }

namespace {

GaussRule build_rule(int n) {
  GaussRule r;
  if (n == 1) {
    r.nodes = {0.0};
    r.weights = {2.0};
    return r;
  }
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

double gauss_panel(const Fn1& f, double a, double b, const GaussRule& r) {
  double h = 0.5 * (b - a), m = 0.5 * (a + b), s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    double v = f(m + h * r.nodes[i]);
    check_finite(v);
    s += r.weights[i] * v;
  }
  return s * h;
}

double adapt(const Fn1& f, double a, double b, double whole, double tol, int depth, const Quad1DOptions& opt,
             const GaussRule& r) {
  double m = 0.5 * (a + b);
  double left = gauss_panel(f, a, m, r);
  double right = gauss_panel(f, m, b, r);
  double sum = left + right;
  double err = std::abs(sum - whole);
  if (err <= std::max(tol, opt.rel_tol * std::abs(sum)) || depth >= opt.max_depth || m <= a || m >= b) return sum;
  return adapt(f, a, m, left, 0.5 * tol, depth + 1, opt, r) + adapt(f, m, b, right, 0.5 * tol, depth + 1, opt, r);
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

double integrate_1d(const Fn1& f, double a, double b, const Quad1DOptions& opt) {
  if (b == a) return 0.0;
  if (b < a) return -integrate_1d(f, b, a, opt);
  std::vector<double> cuts{a};
  std::vector<double> bp = opt.breakpoints;
  std::sort(bp.begin(), bp.end());
  for (double c : bp)
    if (c > cuts.back() && c < b) cuts.push_back(c);
  cuts.push_back(b);
  const GaussRule& r = gauss_legendre(opt.order);
  double total = 0.0;
  double span = b - a;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    double tol = opt.abs_tol * (hi - lo) / span;
    double whole = gauss_panel(f, lo, hi, r);
    total += adapt(f, lo, hi, whole, tol, 0, opt, r);
  }
  return total;
}

void composite_rule(double a, double b, int order, int panels, std::vector<double>& x, std::vector<double>& w) {
  const GaussRule& r = gauss_legendre(order);
  x.clear();
  w.clear();
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      x.push_back(lo + 0.5 * h * (r.nodes[i] + 1.0));
      w.push_back(0.5 * h * r.weights[i]);
    }
  }
}

double integrate_1d_fixed(const Fn1& f, double a, double b, int order, int panels) {
  std::vector<double> x, w;
  composite_rule(a, b, order, panels, x, w);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = f(x[i]);
    check_finite(v);
    s += w[i] * v;
  }
  return s;
}

}  // namespace dmf
