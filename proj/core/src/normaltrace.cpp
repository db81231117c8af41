#include "dmfield/normaltrace.hpp"

#include <random>
#include <sstream>

namespace dmf {

namespace {

RadonMeasure singular_only(const RadonMeasure& m) {
  RadonMeasure r(m.box(), m.dim());
  for (const Atom& a : m.atoms()) r.add(a);
  for (const CurvePart& c : m.curves()) r.add(c);
  return r;
}

DMField singular_field(const DMField& f) {
  DMField g = f;
  for (auto& c : g.components) c = singular_only(c);
  return g;
}

double default_eps0(const DMField& f, const OpenSet& u) {
  return 0.25 * std::min(u.max_depth(), f.window.scale());
}

// Parameters in (0,1) where `keep` changes value along the piece.
std::vector<double> keep_breaks(const BoundaryPiece& p, const Predicate& keep) {
  std::vector<double> out;
  if (!keep) return out;
  const int n = 256;
  bool prev = keep(p.point(0.0));
  for (int i = 1; i <= n; ++i) {
    double s = static_cast<double>(i) / n;
    bool cur = keep(p.point(s));
    if (cur != prev) {
      double a = s - 1.0 / n, b = s;
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + b);
        (keep(p.point(m)) == prev ? a : b) = m;
      }
      out.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  return out;
}

struct Crossing {
  Vec2 x;
  double w = 0.0;  // trace mass of the crossing
};

// Transversal crossings of the curve parts of F with the level curve {d = eps}.
std::vector<Crossing> crossings(const DMField& f, const OpenSet& u, double eps) {
  std::vector<Crossing> out;
  for (std::size_t j = 0; j < f.components.size(); ++j) {
    for (const CurvePart& c : f.components[j].curves()) {
      const int n = 512;
      auto g = [&](double t) { return u.depth(c.gamma(t)) - eps; };
      double tp = c.t0, gp = g(tp);
      for (int i = 1; i <= n; ++i) {
        double t = c.t0 + (c.t1 - c.t0) * i / n;
        double gt = g(t);
        if ((gp < 0) != (gt < 0) && gp != 0.0) {
          double a = tp, b = t, ga = gp;
          for (int it = 0; it < 80; ++it) {
            double m = 0.5 * (a + b), gm = g(m);
            if ((gm < 0) == (ga < 0)) {
              a = m;
              ga = gm;
            } else {
              b = m;
            }
          }
          double tc = 0.5 * (a + b);
          Vec2 x = c.gamma(tc);
          Vec2 dg = c.dgamma(tc);
          double speed = norm(dg);
          if (speed == 0.0) continue;
          Vec2 tau = dg / speed;
          Vec2 nu = u.grad_dist(x);
          double tn = std::abs(dot(tau, nu));
          if (tn < 1e-12) continue;
          double g_arc = c.weight(tc) / speed;
          out.push_back({x, g_arc * nu[static_cast<int>(j)] / tn});
        }
        tp = t;
        gp = gt;
      }
    }
  }
  return out;
}

std::vector<double> piece_breaks(const DMField& f, const BoundaryPiece& p, const Predicate& keep) {
  std::vector<double> br = keep_breaks(p, keep);
  auto add = [&](const Vec2& x) {
    double s = p.project(x);
    if (s > 0.0 && s < 1.0) br.push_back(s);
  };
  for (const Vec2& x : f.ac_singular_points()) add(x);
  for (const Vec2& x : f.ac_kinks()) add(x);
  std::sort(br.begin(), br.end());
  return br;
}

void fill(TraceResult& r, const LadderResult& lr, double sign) {
  r.ladder_h = lr.h;
  r.ladder_raw = lr.raw;
  r.extrapolated = lr.extrapolated;
  r.value = lr.extrapolated;
  r.converged = lr.converged;
  r.residual = lr.residual;
  r.diagnostic = lr.diagnostic;
  (void)sign;
}

std::vector<double> good_ladder(const DMField& f, const OpenSet& u, const TraceOptions& opt, double h0) {
  LadderOptions lo = opt.eps;
  lo.h0 = h0;
  std::vector<double> h;
  for (double e : ladder_steps(lo)) h.push_back(nearest_good_offset(f, u, e, opt));
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> bad_offsets(const DMField& f, const OpenSet& u) {
  std::vector<double> out;
  auto add_point = [&](const Vec2& x) {
    if (u.contains(x)) out.push_back(u.depth(x));
  };
  auto add_measure = [&](const RadonMeasure& m) {
    for (const Atom& a : m.atoms()) add_point(a.x);
    for (const CurvePart& c : m.curves()) {
      add_point(c.gamma(c.t0));
      add_point(c.gamma(c.t1));
      // runs of the curve along a level set of d
      const int n = 256;
      const double tol = 1e-10 * std::max(1.0, f.window.scale());
      double prev = 0.0;
      int run = 0;
      for (int i = 0; i <= n; ++i) {
        Vec2 x = c.gamma(c.t0 + (c.t1 - c.t0) * i / n);
        if (!u.contains(x)) {
          run = 0;
          continue;
        }
        double d = u.depth(x);
        run = (run > 0 && std::abs(d - prev) < tol) ? run + 1 : 1;
        if (run == 3) out.push_back(d);
        prev = d;
      }
    }
  };
  for (const auto& c : f.components) add_measure(c);
  if (f.divergence) add_measure(*f.divergence);
  for (const Vec2& x : f.ac_singular_points()) add_point(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_good_offset(const DMField& f, const OpenSet& u, double eps, const TraceOptions& opt) {
  if (!(eps > 0)) return false;
  double tol = std::max(opt.good_eps_tol, 1e-3 * eps);
  for (double b : bad_offsets(f, u))
    if (std::abs(eps - b) <= tol) return false;
  return true;
}

double nearest_good_offset(const DMField& f, const OpenSet& u, double eps, const TraceOptions& opt) {
  if (is_good_offset(f, u, eps, opt)) return eps;
  for (int j = 1; j <= 50; ++j) {
    for (double s : {1.0, -1.0}) {
      double e = eps * (1.0 + s * 0.01 * j);
      if (is_good_offset(f, u, e, opt)) return e;
    }
  }
  throw NumericalError("no good offset near eps");
}

double classical_flux(const DMField& f, const OpenSet& u, const ScalarFn& phi, double eps, const Predicate& keep,
                      const TraceOptions& opt) {
  double total = 0.0;
  for (const BoundaryPiece& p : u.boundary(eps)) {
    Quad1DOptions qo = opt.boundary;
    qo.breakpoints = piece_breaks(f, p, keep);
    total += integrate_1d(
        [&](double s) {
          Vec2 x = p.point(s);
          if (keep && !keep(x)) return 0.0;
          double ph = phi ? phi(x) : 1.0;
          if (ph == 0.0) return 0.0;
          return ph * dot(f.ac_value(x), p.normal(s)) * p.speed(s);
        },
        0.0, 1.0, qo);
  }
  return total * convention_sign(opt.convention);
}

double offset_trace(const DMField& f, const OpenSet& u, double eps, const ScalarFn& phi, const Predicate& keep,
                    const TraceOptions& opt) {
  double total = classical_flux(f, u, phi, eps, keep, opt);
  double atoms = 0.0;
  for (const Crossing& c : crossings(f, u, eps))
    if (!keep || keep(c.x)) atoms += c.w * (phi ? phi(c.x) : 1.0);
  return total + atoms * convention_sign(opt.convention);
}

TraceResult trace_measure_on_offset(const DMField& f, const OpenSet& u, double eps, const TraceOptions& opt) {
  if (!is_good_offset(f, u, eps, opt)) {
    std::ostringstream os;
    os << "eps = " << eps << " meets registered singular mass; nearest good eps is "
       << nearest_good_offset(f, u, eps, opt);
    throw PreconditionError(os.str());
  }
  const double sign = convention_sign(opt.convention);
  RadonMeasure m(f.window);
  auto field = std::make_shared<DMField>(f);
  for (const BoundaryPiece& p : u.boundary(eps)) {
    CurvePart c;
    c.gamma = [p](double s) { return p.point(s); };
    c.dgamma = [p](double s) { return p.deriv(s); };
    c.weight = [p, field, sign](double s) { return sign * dot(field->ac_value(p.point(s)), p.normal(s)) * p.speed(s); };
    c.breaks = piece_breaks(f, p, nullptr);
    m.add(std::move(c));
  }
  for (const Crossing& c : crossings(f, u, eps)) m.add(Atom{c.x, sign * c.w});
  TraceResult r;
  r.route = "offset boundary measure";
  r.ladder_h = {eps};
  r.value = integrate(m, [](const Vec2&) { return 1.0; });
  r.ladder_raw = {r.value};
  r.extrapolated = r.value;
  r.measure = std::move(m);
  return r;
}

TraceResult trace_functional(const DMField& f, const OpenSet& u, const TestFunction& phi, bool closed,
                             const TraceOptions& opt) {
  TraceResult r;
  const double sign = convention_sign(opt.convention);
  Region reg = closed ? Region::closed(u) : Region::open(u);
  MeasureDomain dom = reg.domain();
  LimitValue pair = pairing_over(f, phi, nullptr, dom, opt.pairing);
  LimitValue div = divergence_integral(f, phi.value, dom, opt.pairing);
  r.value = -sign * (pair.value + div.value);
  r.extrapolated = r.value;
  r.converged = pair.converged && div.converged;
  r.route = "definition: " + pair.route + " / " + div.route;
  if (pair.limit) {
    r.ladder_h = pair.ladder.h;
    r.ladder_raw = pair.ladder.raw;
    r.residual = pair.ladder.residual;
  }
  r.diagnostic = pair.diagnostic.empty() ? div.diagnostic : pair.diagnostic;

  // Cross-check of the closed trace through the complement, when phi lives in the open window.
  Region ext = Region::exterior(u, f.window);
  if (closed && !phi.support.empty() && f.window.contains_open(phi.support.lo) &&
      f.window.contains_open(phi.support.hi) && ext.exact()) {
    MeasureDomain edom = ext.domain();
    double ep = pairing_over(f, phi, nullptr, edom, opt.pairing).value;
    double ed = divergence_integral(f, phi.value, edom, opt.pairing).value;
    r.reference = sign * (ep + ed);
  }
  return r;
}

TraceResult exterior_trace(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt) {
  TraceResult r = trace_functional(f, u, phi, true, opt);
  r.value = -r.value;
  r.extrapolated = -r.extrapolated;
  if (r.reference) r.reference = -*r.reference;
  r.route = "exterior " + r.route;
  return r;
}

TraceResult trace_limit(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt) {
  double h0 = opt.eps.h0 > 0 ? opt.eps.h0 : default_eps0(f, u);
  std::vector<double> h = good_ladder(f, u, opt, h0), v;
  for (double e : h) v.push_back(offset_trace(f, u, e, phi.value, nullptr, opt));
  TraceResult r;
  fill(r, richardson(h, v, opt.eps), 1.0);
  r.route = "limit of offset trace measures";
  r.reference = trace_functional(f, u, phi, false, opt).value;
  return r;
}

TraceResult trace_averaged(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt) {
  const double sign = convention_sign(opt.convention);
  double h0 = opt.eps.h0 > 0 ? opt.eps.h0 : default_eps0(f, u);
  std::vector<double> h = good_ladder(f, u, opt, h0), v;
  TestFunction du = distance_function(u);
  for (double e : h) {
    PairingOptions po = opt.pairing;
    if (f.has_singular_part()) po.delta.h0 = e / 10.0;
    MeasureDomain dom = Region::shell(u, 0.0, e).domain();
    v.push_back(sign * pairing_over(f, du, phi.value, dom, po).value / e);
  }
  TraceResult r;
  fill(r, richardson(h, v, opt.eps), sign);
  r.route = "shell average";
  return r;
}

MeasureVerdict is_measure_test(const DMField& f, const OpenSet& u, const TraceOptions& opt) {
  MeasureVerdict mv;
  double h0 = opt.eps.h0 > 0 ? opt.eps.h0 : default_eps0(f, u);
  mv.eps = good_ladder(f, u, opt, h0);
  TestFunction du = distance_function(u);
  for (double e : mv.eps) {
    MeasureDomain dom = Region::shell(u, 0.0, e).domain();
    mv.values.push_back(pairing_over(f, du, nullptr, dom, opt.pairing, true).value / e);
  }
  double early = 0.0;
  for (std::size_t k = 0; k < (mv.values.size() + 1) / 2; ++k) early = std::max(early, mv.values[k]);
  mv.bound = *std::max_element(mv.values.begin(), mv.values.end());
  mv.bounded = mv.values.back() <= 2.0 * early + 1e-12;
  return mv;
}

CoareaResult coarea_check(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt) {
  CoareaResult c;
  TraceOptions to = opt;
  to.convention = Convention::interior;
  to.boundary.abs_tol = 1e-11;
  double top = std::min(u.max_depth(), f.window.scale());
  Quad1DOptions qo;
  qo.abs_tol = 1e-9;
  qo.rel_tol = 1e-10;
  qo.max_depth = 20;
  for (double b : u.level_breaks())
    if (b > 0 && b < top) qo.breakpoints.push_back(b);
  for (double b : bad_offsets(f, u))
    if (b > 0 && b < top) qo.breakpoints.push_back(b);
  std::sort(qo.breakpoints.begin(), qo.breakpoints.end());
  c.lhs = integrate_1d([&](double t) { return offset_trace(f, u, t, phi.value, nullptr, to); }, 0.0, top, qo);
  TestFunction du = distance_function(u);
  c.rhs = pairing_over(f, du, phi.value, Region::open(u).domain(), opt.pairing).value;
  c.residual = std::abs(c.lhs - c.rhs);
  return c;
}

JumpResult jump(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt) {
  JumpResult j;
  j.open_trace = trace_functional(f, u, phi, false, opt).value;
  j.closed_trace = trace_functional(f, u, phi, true, opt).value;
  j.value = j.open_trace - j.closed_trace;
  MeasureDomain bdom;
  bdom.contains = [u](const Vec2& x) { return u.contains_closure(x) && !u.contains(x); };
  bdom.name = "boundary";
  if (f.divergence) {
    DMField g = singular_field(f);
    double pair = pairing_over(g, phi, nullptr, bdom, opt.pairing).value;
    double div = integrate(restrict(*f.divergence, bdom), phi.value);
    j.formula = convention_sign(opt.convention) * (pair + div);
  } else {
    j.formula = j.value;
  }
  return j;
}

double localization_check(const DMField& f, const OpenSet& u, const OpenSet& v, const OpenSet& a,
                          const TestFunction& phi, bool verify, std::uint64_t seed, const TraceOptions& opt) {
  if (verify) {
    Box b = a.bounds().intersect(f.window);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(b.lo.x, b.hi.x), uy(b.lo.y, b.hi.y);
    for (int i = 0; i < 4000; ++i) {
      Vec2 x{ux(rng), uy(rng)};
      if (a.contains(x) && u.contains(x) != v.contains(x))
        throw PreconditionError("localization: the two sets differ inside A");
    }
  }
  double tu = trace_functional(f, u, phi, false, opt).value;
  double tv = trace_functional(f, v, phi, false, opt).value;
  return std::abs(tu - tv);
}

double support_check(const DMField& f, const OpenSet& e, bool closed, const TestFunction& phi,
                     const TraceOptions& opt) {
  double worst = 0.0;
  for (const Vec2& x : e.sample_boundary(400)) worst = std::max(worst, std::abs(phi(x)));
  if (worst > 1e-9) throw PreconditionError("support_check: phi does not vanish on the boundary");
  return std::abs(trace_functional(f, e, phi, closed, opt).value);
}

TraceResult corner_atom(const DMField& f, const OpenSet& u, Vec2 p, double radius, const TraceOptions& opt) {
  Predicate keep = [p, radius](const Vec2& x) { return dist(x, p) < radius; };
  double h0 = opt.eps.h0 > 0 ? opt.eps.h0 : radius / 4.0;
  std::vector<double> h = good_ladder(f, u, opt, h0), v;
  for (double e : h) v.push_back(offset_trace(f, u, e, nullptr, keep, opt));
  TraceResult r;
  fill(r, richardson(h, v, opt.eps), 1.0);
  double smooth = classical_flux(f, u, nullptr, 0.0, keep, opt);
  r.value = r.extrapolated - smooth;
  r.reference = smooth;
  r.route = "offset mass in a ball minus classical boundary flux";
  return r;
}

}  // namespace dmf
