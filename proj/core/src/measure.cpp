#include "dmfield/measure.hpp"

#include "dmfield/mollifier.hpp"

namespace dmf {

namespace {

// max over s in [0,1) of exp(1 - 1/(1-s^2)) * 2 s / (1-s^2)^2 : Lipschitz constant of the unit bump.
double unit_bump_lip() {
  static const double v = [] {
    double best = 0.0;
    for (int i = 1; i < 20000; ++i) {
      double s = i / 20000.0, q = 1.0 - s * s;
      best = std::max(best, std::exp(1.0 - 1.0 / q) * 2.0 * s / (q * q));
    }
    return best;
  }();
  return v;
}

}  // namespace

TestFunction TestFunction::bump(Vec2 c, double r, double h) {
  TestFunction f;
  double inv = 1.0 / (r * r);
  f.value = [c, inv, h](const Vec2& x) {
    double q = dot(x - c, x - c) * inv;
    return q < 1.0 ? h * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
  };
  f.grad = [c, inv, h](const Vec2& x) {
    Vec2 d = x - c;
    double q = dot(d, d) * inv;
    if (q >= 1.0) return Vec2{};
    double one = 1.0 - q;
    double v = h * std::exp(1.0 - 1.0 / one);
    return d * (-2.0 * inv * v / (one * one));
  };
  f.lip = std::abs(h) * unit_bump_lip() / r;
  f.support = Box(c - Vec2{r, r}, c + Vec2{r, r});
  f.tag = TestTag::c1c;
  f.smooth = true;
  f.name = "bump";
  return f;
}

TestFunction TestFunction::bump1d(double c, double r, double h) {
  TestFunction f = bump({c, 0.0}, r, h);
  auto v = f.value;
  auto g = f.grad;
  f.value = [v](const Vec2& x) { return v({x.x, 0.0}); };
  f.grad = [g](const Vec2& x) { return Vec2{g({x.x, 0.0}).x, 0.0}; };
  f.support = Box::interval(c - r, c + r);
  f.name = "bump1d";
  return f;
}

TestFunction TestFunction::constant(double c, const Box& support) {
  TestFunction f;
  f.value = [c](const Vec2&) { return c; };
  f.grad = [](const Vec2&) { return Vec2{}; };
  f.lip = 0.0;
  f.support = support;
  f.tag = TestTag::lipschitz;
  f.smooth = true;
  f.name = "constant";
  return f;
}

TestFunction TestFunction::linear(Vec2 a, double b, const Box& support) {
  TestFunction f;
  f.value = [a, b](const Vec2& x) { return dot(a, x) + b; };
  f.grad = [a](const Vec2&) { return a; };
  f.lip = norm(a);
  f.support = support;
  f.tag = TestTag::lipschitz;
  f.smooth = true;
  f.name = "linear";
  return f;
}

TestFunction TestFunction::borel(ScalarFn g, const Box& support, std::string name) {
  TestFunction f;
  f.value = std::move(g);
  f.grad = [](const Vec2&) { return Vec2{}; };
  f.support = support;
  f.tag = TestTag::borel;
  f.name = std::move(name);
  return f;
}

TestFunction TestFunction::product(const TestFunction& a, const TestFunction& b) {
  TestFunction f;
  auto av = a.value, bv = b.value;
  auto ag = a.grad, bg = b.grad;
  f.value = [av, bv](const Vec2& x) { return av(x) * bv(x); };
  f.grad = [av, bv, ag, bg](const Vec2& x) { return bg(x) * av(x) + ag(x) * bv(x); };
  f.lip = a.lip * b.sup_estimate() + a.sup_estimate() * b.lip;
  f.support = a.support.intersect(b.support);
  f.tag = std::max(a.tag, b.tag);
  f.smooth = a.smooth && b.smooth;
  f.name = a.name + "*" + b.name;
  f.grad_cells = !a.grad_cells.empty() ? a.grad_cells : b.grad_cells;
  return f;
}

TestFunction TestFunction::scaled(double s) const {
  TestFunction f = *this;
  auto v = value;
  auto g = grad;
  f.value = [v, s](const Vec2& x) { return s * v(x); };
  f.grad = [g, s](const Vec2& x) { return g(x) * s; };
  f.lip = std::abs(s) * lip;
  return f;
}

double TestFunction::sup_estimate(int n) const {
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 x{support.lo.x + support.width() * i / (n - 1.0), support.lo.y + support.height() * j / (n - 1.0)};
      best = std::max(best, std::abs(value(x)));
    }
  return best;
}

std::vector<TestFunction> bump_dictionary(const Box& w) {
  std::vector<TestFunction> out;
  Vec2 c = w.center();
  double qx = 0.25 * w.width(), qy = 0.25 * w.height();
  if (w.dim == 1) {
    const double offs[5] = {-0.5, -0.25, 0.0, 0.25, 0.5};
    const double scales[5] = {0.04, 0.07, 0.1, 0.14, 0.2};
    for (double o : offs)
      for (double s : scales) out.push_back(TestFunction::bump1d(c.x + o * 0.5 * w.width(), s * w.width()));
    return out;
  }
  const Vec2 centers[5] = {c, c + Vec2{-qx, -qy}, c + Vec2{qx, -qy}, c + Vec2{qx, qy}, c + Vec2{-qx, qy}};
  const double scales[5] = {0.05, 0.08, 0.12, 0.16, 0.22};
  double m = std::min(w.width(), w.height());
  for (const Vec2& p : centers)
    for (double s : scales) {
      TestFunction f = TestFunction::bump(p, s * m);
      f.name = "dict";
      out.push_back(f);
    }
  return out;
}

CurvePart CurvePart::segment(Vec2 a, Vec2 b, Fn1 density) {
  CurvePart c;
  Vec2 d = b - a;
  double len = norm(d);
  c.gamma = [a, d](double t) { return a + d * t; };
  c.dgamma = [d](double) { return d; };
  c.weight = [density, len](double t) { return density(t) * len; };
  return c;
}

CurvePart CurvePart::arc(Vec2 center, double r, double th0, double th1, Fn1 density) {
  CurvePart c;
  double span = th1 - th0;
  c.gamma = [=](double t) {
    double th = th0 + t * span;
    return center + Vec2{std::cos(th), std::sin(th)} * r;
  };
  c.dgamma = [=](double t) {
    double th = th0 + t * span;
    return Vec2{-std::sin(th), std::cos(th)} * (r * span);
  };
  c.weight = [density, r, span](double t) { return density(t) * r * std::abs(span); };
  return c;
}

CurvePart CurvePart::polyline(const std::vector<Vec2>& pts, Fn1 density) {
  if (pts.size() < 2) throw ConfigError("polyline needs at least two points");
  CurvePart c;
  auto p = std::make_shared<std::vector<Vec2>>(pts);
  int m = static_cast<int>(pts.size()) - 1;
  auto locate = [p, m](double t, int& i, double& u) {
    double s = std::clamp(t, 0.0, 1.0) * m;
    i = std::min(static_cast<int>(s), m - 1);
    u = s - i;
  };
  c.gamma = [p, locate](double t) {
    int i;
    double u;
    locate(t, i, u);
    return (*p)[i] + ((*p)[i + 1] - (*p)[i]) * u;
  };
  c.dgamma = [p, locate, m](double t) {
    int i;
    double u;
    locate(t, i, u);
    return ((*p)[i + 1] - (*p)[i]) * double(m);
  };
  auto dg = c.dgamma;
  c.weight = [density, dg](double t) { return density(t) * norm(dg(t)); };
  for (int i = 1; i < m; ++i) c.breaks.push_back(double(i) / m);
  return c;
}

CurvePart CurvePart::scaled(double s) const {
  CurvePart c = *this;
  auto w = weight;
  c.weight = [w, s](double t) { return s * w(t); };
  return c;
}

RadonMeasure RadonMeasure::lebesgue(const Box& box, ScalarFn density) {
  RadonMeasure m(box, box.dim);
  AcPart p;
  p.density = density ? std::move(density) : ScalarFn([](const Vec2&) { return 1.0; });
  m.add(std::move(p));
  return m;
}

RadonMeasure RadonMeasure::dirac(const Box& box, Vec2 x, double w) {
  RadonMeasure m(box, box.dim);
  m.add(Atom{x, w});
  return m;
}

RadonMeasure& RadonMeasure::add(AcPart p) {
  ac_.push_back(std::move(p));
  return *this;
}

RadonMeasure& RadonMeasure::add(Atom a) {
  atoms_.push_back(a);
  return *this;
}

RadonMeasure& RadonMeasure::add(CurvePart c) {
  curves_.push_back(std::move(c));
  return *this;
}

std::vector<Vec2> RadonMeasure::singular_points() const {
  std::vector<Vec2> out;
  for (const auto& p : ac_) out.insert(out.end(), p.singular.begin(), p.singular.end());
  return out;
}

RadonMeasure RadonMeasure::operator+(const RadonMeasure& o) const {
  RadonMeasure r = *this;
  // Each part keeps its own domain; a part without explicit cells is bound to its original box.
  for (AcPart p : o.ac_) {
    if (p.cells.empty() && o.dim_ == 2) {
      Box b = o.box_;
      p.cells.push_back(Patch::rect(b));
      p.domain.push_back([b](const Vec2& x) { return b.contains(x); });
    }
    r.ac_.push_back(std::move(p));
  }
  if (r.dim_ == 2)
    for (std::size_t i = 0; i < ac_.size(); ++i)
      if (r.ac_[i].cells.empty()) {
        Box b = box_;
        r.ac_[i].cells.push_back(Patch::rect(b));
        r.ac_[i].domain.push_back([b](const Vec2& x) { return b.contains(x); });
      }
  r.atoms_.insert(r.atoms_.end(), o.atoms_.begin(), o.atoms_.end());
  r.curves_.insert(r.curves_.end(), o.curves_.begin(), o.curves_.end());
  r.box_ = Box({std::min(box_.lo.x, o.box_.lo.x), std::min(box_.lo.y, o.box_.lo.y)},
               {std::max(box_.hi.x, o.box_.hi.x), std::max(box_.hi.y, o.box_.hi.y)}, dim_);
  return r;
}

RadonMeasure RadonMeasure::operator*(double s) const {
  RadonMeasure r = *this;
  for (auto& p : r.ac_) {
    auto d = p.density;
    p.density = [d, s](const Vec2& x) { return s * d(x); };
  }
  for (auto& a : r.atoms_) a.w *= s;
  for (auto& c : r.curves_) c = c.scaled(s);
  return r;
}

std::vector<Patch> RadonMeasure::ac_cells(std::size_t i) const {
  const AcPart& p = ac_[i];
  std::vector<Patch> cells = p.cells;
  if (cells.empty()) cells.push_back(Patch::rect(box_));
  return split_patches(std::move(cells), p.singular);
}

MeasureDomain MeasureDomain::box(const Box& b, bool open) {
  MeasureDomain d;
  if (open)
    d.contains = [b](const Vec2& x) { return b.contains_open(x); };
  else
    d.contains = [b](const Vec2& x) { return b.contains(x); };
  if (b.dim == 2) d.cells.push_back(Patch::rect(b));
  d.name = "box";
  return d;
}

MeasureDomain MeasureDomain::everywhere() {
  MeasureDomain d;
  d.contains = [](const Vec2&) { return true; };
  d.name = "everywhere";
  return d;
}

double integrate_ac(const RadonMeasure& mu, const ScalarFn& f, const IntegrateOptions& opt) {
  double total = 0.0;
  for (std::size_t i = 0; i < mu.ac().size(); ++i) {
    const AcPart& p = mu.ac()[i];
    auto g = [&](const Vec2& x) {
      for (const auto& ind : p.indicators)
        if (!ind(x)) return 0.0;
      double fx = f(x);
      if (fx == 0.0) return 0.0;
      return fx * p.density(x);
    };
    if (mu.dim() == 1) {
      Quad1DOptions o = opt.curve;
      for (const Vec2& s : p.singular) o.breakpoints.push_back(s.x);
      for (const Vec2& s : p.kinks) o.breakpoints.push_back(s.x);
      total += integrate_1d([&](double x) { return g({x, 0.0}); }, mu.box().lo.x, mu.box().hi.x, o);
    } else {
      total += integrate_patches<double>(mu.ac_cells(i), g, opt.area);
    }
  }
  return total;
}

double integrate_atoms(const RadonMeasure& mu, const ScalarFn& f) {
  double s = 0.0;
  for (const Atom& a : mu.atoms()) s += a.w * f(a.x);
  return s;
}

double integrate_curves(const RadonMeasure& mu, const ScalarFn& f, const IntegrateOptions& opt) {
  double s = 0.0;
  for (const CurvePart& c : mu.curves()) {
    Quad1DOptions o = opt.curve;
    o.breakpoints.insert(o.breakpoints.end(), c.breaks.begin(), c.breaks.end());
    s += integrate_1d([&](double t) { return f(c.gamma(t)) * c.weight(t); }, c.t0, c.t1, o);
  }
  return s;
}

double integrate(const RadonMeasure& mu, const ScalarFn& f, const IntegrateOptions& opt) {
  return integrate_ac(mu, f, opt) + integrate_atoms(mu, f) + integrate_curves(mu, f, opt);
}

double integrate(const RadonMeasure& mu, const TestFunction& f, const IntegrateOptions& opt) {
  return integrate(mu, f.value, opt);
}

RadonMeasure abs_measure(const RadonMeasure& mu) {
  RadonMeasure r(mu.box(), mu.dim());
  for (AcPart p : mu.ac()) {
    auto d = p.density;
    p.density = [d](const Vec2& x) { return std::abs(d(x)); };
    r.add(std::move(p));
  }
  for (Atom a : mu.atoms()) {
    a.w = std::abs(a.w);
    r.add(a);
  }
  for (CurvePart c : mu.curves()) {
    auto w = c.weight;
    c.weight = [w](double t) { return std::abs(w(t)); };
    r.add(std::move(c));
  }
  return r;
}

std::vector<std::pair<double, double>> curve_intervals(const CurvePart& c, const Predicate& pred, int samples) {
  std::vector<double> cuts{c.t0};
  for (double b : c.breaks)
    if (b > c.t0 && b < c.t1) cuts.push_back(b);
  cuts.push_back(c.t1);
  std::vector<double> ts;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double a = cuts[k], b = cuts[k + 1];
    int n = std::max(8, static_cast<int>(samples * (b - a) / (c.t1 - c.t0)));
    for (int i = 0; i < n; ++i) ts.push_back(a + (b - a) * i / n);
  }
  ts.push_back(c.t1);
  auto bisect = [&](double a, double b, bool va) {
    for (int it = 0; it < 64; ++it) {
      double m = 0.5 * (a + b);
      if (pred(c.gamma(m)) == va) a = m;
      else b = m;
    }
    return 0.5 * (a + b);
  };
  std::vector<std::pair<double, double>> out;
  bool prev = pred(c.gamma(ts[0]));
  double start = ts[0];
  for (std::size_t i = 1; i < ts.size(); ++i) {
    bool v = pred(c.gamma(ts[i]));
    if (v != prev) {
      double x = bisect(ts[i - 1], ts[i], prev);
      if (v) start = x;
      else if (x > start) out.emplace_back(start, x);
    }
    prev = v;
  }
  if (prev && c.t1 > start) out.emplace_back(start, c.t1);
  return out;
}

RadonMeasure restrict(const RadonMeasure& mu, const MeasureDomain& e) {
  if (!e.contains) return mu;
  RadonMeasure r(mu.box(), mu.dim());
  for (AcPart p : mu.ac()) {
    if (!e.cells.empty() && mu.dim() == 2) {
      // integrate over the target cells; the part's previous domain becomes a multiplicative filter
      if (p.cells.empty()) {
        Box b = mu.box();
        p.indicators.push_back([b](const Vec2& x) { return b.contains(x); });
      }
      p.indicators.insert(p.indicators.end(), p.domain.begin(), p.domain.end());
      p.cells = e.cells;
      p.domain = {e.contains};
      p.polygons.clear();
    } else {
      p.indicators.push_back(e.contains);
    }
    r.add(std::move(p));
  }
  for (const Atom& a : mu.atoms())
    if (e.contains(a.x)) r.add(a);
  for (const CurvePart& c : mu.curves()) {
    for (auto [a, b] : curve_intervals(c, e.contains)) {
      CurvePart s = c;
      s.t0 = a;
      s.t1 = b;
      s.breaks.clear();
      for (double t : c.breaks)
        if (t > a && t < b) s.breaks.push_back(t);
      r.add(std::move(s));
    }
  }
  return r;
}

double total_variation(const RadonMeasure& mu, const MeasureDomain& e, const IntegrateOptions& opt) {
  RadonMeasure a = abs_measure(restrict(mu, e));
  return integrate(a, [](const Vec2&) { return 1.0; }, opt);
}

double total_variation(const RadonMeasure& mu) {
  return integrate(abs_measure(mu), [](const Vec2&) { return 1.0; });
}

ScalarFn mollify(const RadonMeasure& mu, double delta) {
  if (!(delta > 0)) throw PreconditionError("mollify: delta must be positive");
  auto m = std::make_shared<RadonMeasure>(mu);
  return [m, delta](const Vec2& x) {
    const RadonMeasure& mu = *m;
    const int dim = mu.dim();
    Box reach = mu.box().grown(delta);
    if (!reach.contains(x)) return 0.0;
    double s = 0.0;
    for (const AcPart& p : mu.ac()) {
      auto g = [&](const Vec2& y) {
        if (!mu.box().contains(y)) return 0.0;
        for (const auto& ind : p.indicators)
          if (!ind(y)) return 0.0;
        for (const auto& ind : p.domain)
          if (!ind(y)) return 0.0;
        return p.density(y);
      };
      if (dim == 1) {
        Quad1DOptions o;
        o.abs_tol = 1e-14;
        std::vector<double> bp{mu.box().lo.x, mu.box().hi.x};
        o.breakpoints = bp;
        s += integrate_1d([&](double y) { return g({y, 0.0}) * mollifier({x.x - y, 0.0}, delta, 1); }, x.x - delta,
                          x.x + delta, o);
      } else {
        bool kinked = !p.indicators.empty() || !p.cells.empty() || !mu.box().grown(-delta).contains(x);
        s += convolve(g, x, delta, kinked);
      }
    }
    for (const Atom& a : mu.atoms()) s += a.w * mollifier(x - a.x, delta, dim);
    for (const CurvePart& c : mu.curves()) {
      const int n = 1024;
      double h = (c.t1 - c.t0) / n;
      Quad1DOptions o;
      o.abs_tol = 1e-13;
      for (int i = 0; i < n; ++i) {
        double a = c.t0 + i * h, b = a + h;
        Vec2 pa = c.gamma(a), pb = c.gamma(b), pm = c.gamma(0.5 * (a + b));
        double reachd = std::max(dist(pa, pm), dist(pb, pm)) * 1.5 + delta;
        if (dist(pm, x) > reachd) continue;
        s += integrate_1d([&](double t) { return mollifier(x - c.gamma(t), delta, dim) * c.weight(t); }, a, b, o);
      }
    }
    return s;
  };
}

double dictionary_discrepancy(const RadonMeasure& a, const RadonMeasure& b, const std::vector<TestFunction>& dict) {
  double worst = 0.0;
  for (const TestFunction& f : dict) worst = std::max(worst, std::abs(integrate(a, f) - integrate(b, f)));
  return worst;
}

}  // namespace dmf
