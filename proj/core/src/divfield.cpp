#include "dmfield/divfield.hpp"

#include "dmfield/mollifier.hpp"

namespace dmf {

namespace {

bool part_active(const AcPart& p, const RadonMeasure& m, const Vec2& x) {
  if (p.cells.empty() && !m.box().contains(x)) return false;
  for (const auto& ind : p.indicators)
    if (!ind(x)) return false;
  for (const auto& ind : p.domain)
    if (!ind(x)) return false;
  return true;
}

// Only the atoms and curves of a measure.
RadonMeasure singular_part(const RadonMeasure& m) {
  RadonMeasure r(m.box(), m.dim());
  for (const Atom& a : m.atoms()) r.add(a);
  for (const CurvePart& c : m.curves()) r.add(c);
  return r;
}

double delta0(const DMField& f, const PairingOptions& opt) {
  return opt.delta.h0 > 0 ? opt.delta.h0 : f.window.scale() / 8.0;
}

LadderOptions delta_ladder(const DMField& f, const PairingOptions& opt) {
  LadderOptions l = opt.delta;
  l.h0 = delta0(f, opt);
  return l;
}

Box support_cells_box(const DMField& f, const TestFunction& phi, double grow) {
  Box w = f.window;
  if (phi.support.empty()) return w;
  Box s = phi.support.grown(grow).intersect(w);
  return s.empty() ? w : s;
}

// Patches of the polygon pieces of `p` inside `cells`; rectangular cells are clipped exactly,
// any other cell falls back to the whole pieces (the weight and `keep` then localize).
std::vector<Patch> polygon_cells(const AcPart& p, const std::vector<Patch>& cells) {
  std::vector<Patch> out;
  bool fallback = false;
  for (const Patch& c : cells) {
    if (c.base() != Patch::Base::identity || c.domain() != Patch::Domain::rect) {
      fallback = true;
      continue;
    }
    Vec2 lo, hi;
    c.map(0.0, 0.0, lo);
    c.map(1.0, 1.0, hi);
    std::vector<Vec2> clip = box_polygon(Box(lo, hi));
    for (const auto& poly : p.polygons) {
      std::vector<Vec2> piece = clip_convex(poly, clip);
      if (piece.size() < 3 || !(polygon_area(piece) > 0.0)) continue;
      if (piece.size() == 4) {
        out.push_back(Patch::quad(piece[0], piece[1], piece[2], piece[3]));
      } else {
        auto ps = polygon_patches(piece);
        out.insert(out.end(), ps.begin(), ps.end());
      }
    }
  }
  if (fallback) {
    out.clear();
    for (const auto& poly : p.polygons) {
      auto ps = polygon_patches(poly);
      out.insert(out.end(), ps.begin(), ps.end());
    }
  }
  return out;
}

double integrate_vector_ac(const DMField& f, const std::vector<Patch>& cells, const std::function<Vec2(const Vec2&)>& weight,
                           const Predicate& keep, const Quad2DOptions& area, bool absolute) {
  auto pts = f.ac_singular_points();
  auto split = split_patches(cells, pts);
  bool pieces = false, plain = false;
  for (const auto& c : f.components)
    for (const AcPart& p : c.ac()) {
      pieces = pieces || !p.polygons.empty();
      plain = plain || p.polygons.empty();
    }
  auto g = [&](const Vec2& x) {
    if (keep && !keep(x)) return 0.0;
    Vec2 w = weight(x);
    if (w.x == 0.0 && w.y == 0.0) return 0.0;
    Vec2 v;
    if (!pieces) {
      v = f.ac_value(x);
    } else {
      for (std::size_t j = 0; j < f.components.size() && j < 2; ++j)
        for (const AcPart& p : f.components[j].ac())
          if (p.polygons.empty() && part_active(p, f.components[j], x)) v[static_cast<int>(j)] += p.density(x);
    }
    double d = dot(w, v);
    return absolute ? std::abs(d) : d;
  };
  double total = plain || !pieces ? integrate_patches<double>(split, g, area) : 0.0;
  if (!pieces) return total;
  // Parts of different components sharing the same pieces are integrated together so
  // the weight is evaluated once per node.
  struct Group {
    const AcPart* shape;
    std::vector<std::pair<int, const AcPart*>> members;
  };
  std::vector<Group> groups;
  for (std::size_t j = 0; j < f.components.size() && j < 2; ++j)
    for (const AcPart& p : f.components[j].ac()) {
      if (p.polygons.empty()) continue;
      auto same = [&](const Group& gr) {
        const auto& a = gr.shape->polygons;
        if (a.size() != p.polygons.size()) return false;
        for (std::size_t k = 0; k < a.size(); ++k)
          if (a[k].size() != p.polygons[k].size() || !std::equal(a[k].begin(), a[k].end(), p.polygons[k].begin()))
            return false;
        return true;
      };
      auto it = std::find_if(groups.begin(), groups.end(), same);
      if (it == groups.end()) {
        groups.push_back({&p, {}});
        it = groups.end() - 1;
      }
      it->members.push_back({static_cast<int>(j), &p});
    }
  for (const Group& gr : groups) {
    auto h = [&](const Vec2& x) {
      if (keep && !keep(x)) return 0.0;
      Vec2 w = weight(x);
      if (w.x == 0.0 && w.y == 0.0) return 0.0;
      double v = 0.0;
      for (const auto& [j, p] : gr.members) {
        if (w[j] == 0.0) continue;
        bool on = true;
        for (const auto& ind : p->indicators) on = on && ind(x);
        if (on) v += w[j] * p->density(x);
      }
      return absolute ? std::abs(v) : v;
    };
    total += integrate_patches<double>(split_patches(polygon_cells(*gr.shape, cells), pts), h, area);
  }
  return total;
}

// Sum over components of int w_j(y) dF_j^sing(y).
double integrate_vector_singular(const std::vector<RadonMeasure>& sing, const std::function<Vec2(const Vec2&)>& weight,
                                 const Quad1DOptions& curve, bool absolute) {
  double s = 0.0;
  IntegrateOptions io;
  io.curve = curve;
  for (std::size_t j = 0; j < sing.size(); ++j) {
    const int jj = static_cast<int>(j);
    auto g = [&](const Vec2& y) {
      double v = weight(y)[jj];
      return absolute ? std::abs(v) : v;
    };
    RadonMeasure m = absolute ? abs_measure(sing[j]) : sing[j];
    s += integrate_atoms(m, g) + integrate_curves(m, g, io);
  }
  return s;
}

std::vector<Patch> grid_cells(const Box& b, int n) {
  std::vector<Patch> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.push_back(Patch::rect(Box({b.lo.x + b.width() * i / n, b.lo.y + b.height() * j / n},
                                    {b.lo.x + b.width() * (i + 1) / n, b.lo.y + b.height() * (j + 1) / n})));
  return out;
}

bool any_singular(const std::vector<RadonMeasure>& sing) {
  for (const auto& m : sing)
    if (!m.atoms().empty() || !m.curves().empty()) return true;
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------

DMField DMField::zero(const Box& window) {
  DMField f;
  f.window = window;
  f.components = {RadonMeasure::zero(window), RadonMeasure::zero(window)};
  f.divergence = RadonMeasure::zero(window);
  f.name = "zero";
  return f;
}

DMField DMField::from_density(const Box& window, const VectorFn& fn, std::optional<RadonMeasure> div,
                              std::vector<Vec2> singular) {
  DMField f;
  f.window = window;
  for (int j = 0; j < 2; ++j) {
    RadonMeasure m(window);
    AcPart p;
    p.density = [fn, j](const Vec2& x) { return fn(x)[j]; };
    p.singular = singular;
    m.add(std::move(p));
    f.components.push_back(std::move(m));
  }
  f.divergence = std::move(div);
  return f;
}

Vec2 DMField::ac_value(const Vec2& x) const {
  Vec2 v;
  for (std::size_t j = 0; j < components.size() && j < 2; ++j)
    for (const AcPart& p : components[j].ac())
      if (part_active(p, components[j], x)) v[static_cast<int>(j)] += p.density(x);
  return v;
}

bool DMField::has_singular_part() const {
  for (const auto& c : components)
    if (!c.atoms().empty() || !c.curves().empty()) return true;
  return false;
}

std::vector<Vec2> DMField::ac_singular_points() const {
  std::vector<Vec2> out;
  for (const auto& c : components)
    for (const Vec2& p : c.singular_points())
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  return out;
}

std::vector<Vec2> DMField::ac_kinks() const {
  std::vector<Vec2> out;
  for (const auto& c : components)
    for (const AcPart& p : c.ac()) out.insert(out.end(), p.kinks.begin(), p.kinks.end());
  return out;
}

RadonMeasure DMField::bound() const {
  if (mu_bound) return *mu_bound;
  RadonMeasure r = RadonMeasure::zero(window);
  for (const auto& c : components) r = r + abs_measure(c);
  return r;
}

DMField DMField::operator*(double s) const {
  DMField r = *this;
  for (auto& c : r.components) c = c * s;
  if (r.divergence) r.divergence = *r.divergence * s;
  return r;
}

DMField DMField::operator+(const DMField& o) const {
  DMField r = *this;
  for (std::size_t j = 0; j < r.components.size() && j < o.components.size(); ++j)
    r.components[j] = r.components[j] + o.components[j];
  if (r.divergence && o.divergence) r.divergence = *r.divergence + *o.divergence;
  else r.divergence.reset();
  r.mu_bound.reset();
  r.name = name + "+" + o.name;
  return r;
}

// ---------------------------------------------------------------------------

LimitValue pairing_over(const DMField& f, const TestFunction& phi, const ScalarFn& psi, const MeasureDomain& dom,
                        const PairingOptions& opt, bool absolute) {
  LimitValue r;
  std::vector<Patch> cells = dom.cells;
  if (cells.empty()) cells = phi.grad_cells;
  if (cells.empty()) cells.push_back(Patch::rect(support_cells_box(f, phi, 0.0)));
  auto weight = [&](const Vec2& x) {
    double w = psi ? psi(x) : 1.0;
    return w == 0.0 ? Vec2{} : phi.grad(x) * w;
  };
  double ac = integrate_vector_ac(f, cells, weight, dom.contains, opt.area, absolute);

  std::vector<RadonMeasure> sing;
  for (const auto& c : f.components) sing.push_back(restrict(singular_part(c), dom));
  if (!any_singular(sing)) {
    r.value = ac;
    r.route = "a.e. gradient";
    return r;
  }
  if (phi.smooth || absolute) {
    r.value = ac + integrate_vector_singular(sing, weight, opt.curve, absolute);
    r.route = phi.smooth ? "exact gradient" : "a.e. gradient";
    return r;
  }
  // Singular parts meet the non-differentiability of phi: mollify the gradient.
  LadderOptions lo = delta_ladder(f, opt);
  r.ladder = run_ladder(
      [&](double delta) {
        auto mw = [&](const Vec2& y) {
          double w = psi ? psi(y) : 1.0;
          return w == 0.0 ? Vec2{} : mollified_gradient(phi.value, y, delta) * w;
        };
        return integrate_vector_singular(sing, mw, opt.curve, false);
      },
      lo);
  r.limit = true;
  r.value = ac + r.ladder.extrapolated;
  r.converged = r.ladder.converged;
  r.diagnostic = r.ladder.diagnostic;
  r.route = "mollified gradient ladder";
  return r;
}

LimitValue divergence_pairing(const DMField& f, const TestFunction& phi, const PairingOptions& opt) {
  if (!f.divergence) return divergence_pairing_mollified(f, phi, opt);
  LimitValue r;
  r.value = integrate(*f.divergence, phi.value);
  r.route = "stored divergence";
  return r;
}

LimitValue divergence_pairing_mollified(const DMField& f, const TestFunction& phi, const PairingOptions& opt) {
  LimitValue r;
  LadderOptions lo = delta_ladder(f, opt);
  Quad2DOptions area = opt.area;
  area.abs_tol = std::max(area.abs_tol, 1e-9);
  area.rel_tol = std::max(area.rel_tol, 1e-9);
  area.max_depth = std::min(area.max_depth, 1);  // the smooth kernel resolves at one level; deeper only chases 1e-11
  r.ladder = run_ladder(
      [&](double delta) {
        // <div F_delta, phi> = -int (grad phi * rho_delta) . dF
        auto mg = [&](const Vec2& y) {
          if (!phi.support.empty() && !phi.support.grown(delta).contains(y)) return Vec2{};
          return phi.smooth ? convolve_gradient(phi.grad, y, delta) : mollified_gradient(phi.value, y, delta);
        };
        double ac = integrate_vector_ac(f, grid_cells(support_cells_box(f, phi, delta), 8), mg, nullptr, area, false);
        std::vector<RadonMeasure> sing;
        for (const auto& c : f.components) sing.push_back(singular_part(c));
        double s = integrate_vector_singular(sing, mg, opt.curve, false);
        return -(ac + s);
      },
      lo);
  r.limit = true;
  r.value = r.ladder.extrapolated;
  r.converged = r.ladder.converged;
  r.diagnostic = r.ladder.diagnostic;
  r.route = "mollified divergence ladder";
  return r;
}

LimitValue pairing_integrate(const DMField& f, const TestFunction& phi, const ScalarFn& psi, const PairingOptions& opt) {
  return pairing_over(f, phi, psi, MeasureDomain::everywhere(), opt);
}

double grad_pairing(const DMField& f, const TestFunction& phi, const Quad2DOptions& area) {
  std::vector<Patch> cells{Patch::rect(support_cells_box(f, phi, 0.0))};
  double ac = integrate_vector_ac(f, cells, phi.grad, nullptr, area, false);
  std::vector<RadonMeasure> sing;
  for (const auto& c : f.components) sing.push_back(singular_part(c));
  return ac + integrate_vector_singular(sing, phi.grad, Quad1DOptions{}, false);
}

LimitValue divergence_integral(const DMField& f, const ScalarFn& phi, const MeasureDomain& dom,
                               const PairingOptions& opt) {
  LimitValue r;
  if (f.divergence) {
    r.value = integrate(restrict(*f.divergence, dom), phi);
    r.route = "stored divergence";
    return r;
  }
  std::vector<Patch> cells = dom.cells;
  if (cells.empty()) cells.push_back(Patch::rect(f.window));
  Quad2DOptions area = opt.area;
  area.abs_tol = std::max(area.abs_tol, 1e-9);
  area.max_depth = std::min(area.max_depth, 6);
  r.ladder = run_ladder(
      [&](double delta) {
        ScalarFn dv = mollified_divergence(f, delta);
        auto g = [&](const Vec2& x) {
          if (dom.contains && !dom.contains(x)) return 0.0;
          double p = phi(x);
          return p == 0.0 ? 0.0 : p * dv(x);
        };
        return integrate_patches<double>(cells, g, area);
      },
      delta_ladder(f, opt));
  r.limit = true;
  r.value = r.ladder.extrapolated;
  r.converged = r.ladder.converged;
  r.diagnostic = r.ladder.diagnostic;
  r.route = "mollified divergence ladder";
  return r;
}

ScalarFn mollified_divergence(const DMField& f, double delta) {
  if (!(delta > 0)) throw PreconditionError("mollified_divergence: delta must be positive");
  auto field = std::make_shared<DMField>(f);
  return [field, delta](const Vec2& x) {
    const DMField& F = *field;
    // ac part: int F(y) . grad rho_delta(x - y) dy over the delta-ball
    auto cells = ball_cells(x, delta);
    Quad2DOptions o;
    o.abs_tol = 1e-10;
    o.max_depth = 6;
    double s = integrate_patches<double>(cells, [&](const Vec2& y) { return dot(F.ac_value(y), mollifier_grad(x - y, delta)); }, o);
    for (std::size_t j = 0; j < F.components.size(); ++j) {
      const int jj = static_cast<int>(j);
      const RadonMeasure& m = F.components[j];
      for (const Atom& a : m.atoms()) s += a.w * mollifier_grad(x - a.x, delta)[jj];
      for (const CurvePart& c : m.curves()) {
        auto near = curve_intervals(c, [&](const Vec2& y) { return dist(x, y) < delta; }, 256);
        for (auto [a, b] : near) {
          Quad1DOptions qo;
          qo.abs_tol = 1e-12;
          s += integrate_1d([&](double t) { return mollifier_grad(x - c.gamma(t), delta)[jj] * c.weight(t); }, a, b, qo);
        }
      }
    }
    return s;
  };
}

namespace {

// grad(1_S * rho_delta)(y) = int_{boundary S} rho_delta(y - x) nu_in(x) dH^1(x)
Vec2 box_indicator_gradient(const Box& s, const Vec2& y, double delta) {
  const Vec2 corners[4] = {s.lo, {s.hi.x, s.lo.y}, s.hi, {s.lo.x, s.hi.y}};
  Vec2 g;
  for (int k = 0; k < 4; ++k) {
    Vec2 a = corners[k], b = corners[(k + 1) % 4];
    Vec2 d = b - a;
    double len = norm(d);
    Vec2 u = d / len;
    Vec2 nu = perp(u);  // counter-clockwise box: left normal points inside
    double along = dot(y - a, u);
    double off = dot(y - a, nu);
    if (std::abs(off) >= delta) continue;
    double half = std::sqrt(delta * delta - off * off);
    double lo = std::max(0.0, along - half), hi = std::min(len, along + half);
    if (hi <= lo) continue;
    double v = integrate_1d_fixed([&](double t) { return mollifier(y - (a + u * t), delta); }, lo, hi, 20, 4);
    g += nu * v;
  }
  return g;
}

// Long band cells are cut 2 delta from their ends: away from the box corners the
// weight is constant along the band, near them it varies on the scale delta.
void push_band_cell(std::vector<Patch>& out, const Box& b, double delta) {
  auto cuts = [delta](double lo, double hi) {
    std::vector<double> c{lo};
    if (hi - lo > 4.0 * delta) {
      c.push_back(lo + 2.0 * delta);
      c.push_back(hi - 2.0 * delta);
    }
    c.push_back(hi);
    return c;
  };
  std::vector<double> cx = cuts(b.lo.x, b.hi.x), cy = cuts(b.lo.y, b.hi.y);
  for (std::size_t i = 0; i + 1 < cx.size(); ++i)
    for (std::size_t j = 0; j + 1 < cy.size(); ++j) out.push_back(Patch::rect(Box({cx[i], cy[j]}, {cx[i + 1], cy[j + 1]})));
}

std::vector<Patch> box_band_cells(const Box& s, double delta) {
  std::vector<Patch> out;
  Box in = s.grown(-delta);
  Box out_box = s.grown(delta);
  double xs[4] = {out_box.lo.x, s.lo.x, s.hi.x, out_box.hi.x};
  double ys[4] = {out_box.lo.y, s.lo.y, s.hi.y, out_box.hi.y};
  // outer frame
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == 1 && j == 1) continue;
      push_band_cell(out, Box({xs[i], ys[j]}, {xs[i + 1], ys[j + 1]}), delta);
    }
  // inner frame
  if (in.empty()) {
    out.push_back(Patch::rect(s));
    return out;
  }
  double xi[4] = {s.lo.x, in.lo.x, in.hi.x, s.hi.x};
  double yi[4] = {s.lo.y, in.lo.y, in.hi.y, s.hi.y};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == 1 && j == 1) continue;
      push_band_cell(out, Box({xi[i], yi[j]}, {xi[i + 1], yi[j + 1]}), delta);
    }
  return out;
}

}  // namespace

LimitValue mollified_divergence_box(const DMField& f, const Box& s, const PairingOptions& opt) {
  LimitValue r;
  LadderOptions lo = opt.delta;
  if (!(lo.h0 > 0)) lo.h0 = std::min(s.width(), s.height()) / 8.0;
  Quad2DOptions area = opt.area;
  area.abs_tol = std::max(area.abs_tol, 1e-10);
  area.max_depth = std::min(area.max_depth, 7);
  std::vector<RadonMeasure> sing;
  for (const auto& c : f.components) sing.push_back(singular_part(c));
  r.ladder = run_ladder(
      [&](double delta) {
        auto grad = [&](const Vec2& y) { return box_indicator_gradient(s, y, delta); };
        double ac = integrate_vector_ac(f, box_band_cells(s, delta), grad, nullptr, area, false);
        double sg = 0.0;
        for (std::size_t j = 0; j < sing.size(); ++j) {
          const int jj = static_cast<int>(j);
          for (const Atom& a : sing[j].atoms()) sg += a.w * grad(a.x)[jj];
          for (const CurvePart& c : sing[j].curves()) {
            Box inner = s.grown(-delta), outer = s.grown(delta);
            auto band = curve_intervals(c, [&](const Vec2& y) { return outer.contains_open(y) && !inner.contains(y); });
            for (auto [a, b] : band)
              sg += integrate_1d([&](double t) { return grad(c.gamma(t))[jj] * c.weight(t); }, a, b, opt.curve);
          }
        }
        return -(ac + sg);
      },
      lo);
  r.limit = true;
  r.value = r.ladder.extrapolated;
  r.converged = r.ladder.converged;
  r.diagnostic = r.ladder.diagnostic;
  r.route = "mollified divergence over box";
  return r;
}

double product_rule_check(const DMField& f, const TestFunction& phi, const TestFunction& psi, const PairingOptions& opt) {
  if (psi.tag == TestTag::borel) throw PreconditionError("product_rule_check: psi must be differentiable");
  // <div(phi F), psi> = -int grad psi . phi dF
  std::vector<Patch> cells{Patch::rect(support_cells_box(f, psi, 0.0))};
  auto w = [&](const Vec2& x) {
    Vec2 g = psi.grad(x);
    return (g.x == 0.0 && g.y == 0.0) ? Vec2{} : g * phi(x);
  };
  double lhs = -integrate_vector_ac(f, cells, w, nullptr, opt.area, false);
  std::vector<RadonMeasure> sing;
  for (const auto& c : f.components) sing.push_back(singular_part(c));
  lhs -= integrate_vector_singular(sing, w, opt.curve, false);

  TestFunction prod = TestFunction::product(phi, psi);
  double div_term;
  if (f.divergence) div_term = integrate(*f.divergence, prod.value);
  else div_term = divergence_pairing_mollified(f, prod, opt).value;
  double pair = pairing_integrate(f, phi, psi.value, opt).value;
  return std::abs(lhs - div_term - pair);
}

double dmext_norm_lower_bound(const DMField& f, const std::vector<TestFunction>& dict, const PairingOptions& opt) {
  double div_part = 0.0;
  for (const TestFunction& phi : dict) div_part = std::max(div_part, std::abs(divergence_pairing(f, phi, opt).value));
  // |F|(window) >= int |F_ac| + max_j |F_j^sing|
  std::vector<Patch> cells{Patch::rect(f.window)};
  auto split = split_patches(cells, f.ac_singular_points());
  Quad2DOptions area = opt.area;
  area.abs_tol = std::max(area.abs_tol, 1e-9);
  double ac = integrate_patches<double>(split, [&](const Vec2& x) { return norm(f.ac_value(x)); }, area);
  double sing = 0.0;
  for (const auto& c : f.components) sing = std::max(sing, total_variation(singular_part(c)));
  return div_part + ac + sing;
}

double divergence_definition_residual(const DMField& f, const std::vector<TestFunction>& dict) {
  if (!f.divergence) throw PreconditionError("divergence_definition_residual: the field has no stored divergence");
  double worst = 0.0;
  for (const TestFunction& phi : dict) {
    double a = integrate(*f.divergence, phi.value);
    double b = grad_pairing(f, phi);
    worst = std::max(worst, std::abs(a + b));
  }
  return worst;
}

}  // namespace dmf
