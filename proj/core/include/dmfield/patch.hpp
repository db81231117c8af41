#pragma once

#include <memory>
#include <vector>

#include "dmfield/quadrature.hpp"
#include "dmfield/types.hpp"

namespace dmf {

// A one-parameter family of curves {d = eps}, each split into pieces whose
// parametrisation s in [0,1] is continuous in eps. Used to parametrise shells
// by (eps, s) with Jacobian equal to the speed along the level curve.
class LevelSetFamily {
 public:
  virtual ~LevelSetFamily() = default;
  virtual int piece_count() const = 0;
  virtual Vec2 piece_point(int piece, double eps, double s) const = 0;
  virtual double piece_speed(int piece, double eps, double s) const = 0;
};

// Integration cell: a map from the unit square onto a region of the plane.
// The map is the composition of a parameter-domain map (rectangle or Duffy
// triangle) with a base map (identity, polar, level-set, bilinear).
class Patch {
 public:
  enum class Base { identity, polar, levelset, bilinear };
  enum class Domain { rect, duffy };

  static Patch rect(const Box& b);
  static Patch triangle(Vec2 apex, Vec2 b, Vec2 c);
  static Patch polar(Vec2 center, double r0, double r1, double th0, double th1);
  static Patch levelset(std::shared_ptr<const LevelSetFamily> fam, int piece, double e0, double e1);
  static Patch quad(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

  // Maps (s,t) in [0,1]^2 to x; returns |Jacobian|.
  double map(double s, double t, Vec2& x) const;

  // Re-split so that p becomes a Duffy apex (removes 1/|x-p| singularities).
  std::vector<Patch> split_at(const Vec2& p) const;

  Base base() const { return base_; }
  Domain domain() const { return domain_; }

  // Rough bounding box (sampled), used for cheap culling.
  Box bounds() const;

 private:
  double base_map(Vec2 q, Vec2& x) const;
  bool base_inverse(const Vec2& x, Vec2& q) const;

  Base base_ = Base::identity;
  Domain domain_ = Domain::rect;
  Vec2 d0_, d1_, d2_;  // rect: d0 = lo, d1 = hi; duffy: apex, b, c (parameter space)
  Vec2 center_;
  Vec2 corners_[4];
  std::shared_ptr<const LevelSetFamily> fam_;
  int piece_ = 0;
};

struct Quad2DOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int order = 8;
  int max_depth = 9;
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Vec2& v) { return std::abs(v.x) + std::abs(v.y); }
inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

namespace detail {

template <class T, class F>
T tensor_rule(const Patch& p, const F& f, double s0, double s1, double t0, double t1, const GaussRule& r) {
  T acc{};
  double hs = 0.5 * (s1 - s0), ht = 0.5 * (t1 - t0);
  double ms = 0.5 * (s0 + s1), mt = 0.5 * (t0 + t1);
  Vec2 x;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    double s = ms + hs * r.nodes[i];
    for (std::size_t j = 0; j < r.nodes.size(); ++j) {
      double t = mt + ht * r.nodes[j];
      double jac = p.map(s, t, x);
      if (jac == 0.0) continue;
      T v = f(x);
      if (!finite_value(v)) throw_singular_node();
      acc += v * (jac * r.weights[i] * r.weights[j]);
    }
  }
  return acc * (hs * ht);
}

template <class T, class F>
T adapt2(const Patch& p, const F& f, double s0, double s1, double t0, double t1, T whole, double tol, int depth,
         const Quad2DOptions& opt, const GaussRule& r) {
  double sm = 0.5 * (s0 + s1), tm = 0.5 * (t0 + t1);
  T c[4] = {tensor_rule<T>(p, f, s0, sm, t0, tm, r), tensor_rule<T>(p, f, sm, s1, t0, tm, r),
            tensor_rule<T>(p, f, s0, sm, tm, t1, r), tensor_rule<T>(p, f, sm, s1, tm, t1, r)};
  T sum = c[0] + c[1] + c[2] + c[3];
  double err = magnitude(sum - whole);
  if (err <= std::max(tol, opt.rel_tol * magnitude(sum)) || depth >= opt.max_depth) return sum;
  double ct = 0.25 * tol;
  T acc = adapt2<T>(p, f, s0, sm, t0, tm, c[0], ct, depth + 1, opt, r);
  acc += adapt2<T>(p, f, sm, s1, t0, tm, c[1], ct, depth + 1, opt, r);
  acc += adapt2<T>(p, f, s0, sm, tm, t1, c[2], ct, depth + 1, opt, r);
  acc += adapt2<T>(p, f, sm, s1, tm, t1, c[3], ct, depth + 1, opt, r);
  return acc;
}

}  // namespace detail

// Adaptive tensor Gauss over a list of patches. Deterministic summation order.
template <class T = double, class F>
T integrate_patches(const std::vector<Patch>& patches, const F& f, const Quad2DOptions& opt = {}) {
  const GaussRule& r = gauss_legendre(opt.order);
  T total{};
  double tol = opt.abs_tol / std::max<std::size_t>(1, patches.size());
  for (const Patch& p : patches) {
    T whole = detail::tensor_rule<T>(p, f, 0.0, 1.0, 0.0, 1.0, r);
    total += detail::adapt2<T>(p, f, 0.0, 1.0, 0.0, 1.0, whole, tol, 0, opt, r);
  }
  return total;
}

// One tensor rule per patch, no adaptivity.
template <class T = double, class F>
T integrate_patches_fixed(const std::vector<Patch>& patches, const F& f, int order) {
  const GaussRule& r = gauss_legendre(order);
  T total{};
  for (const Patch& p : patches) total += detail::tensor_rule<T>(p, f, 0.0, 1.0, 0.0, 1.0, r);
  return total;
}

// Split every patch at every point (each point becomes a Duffy apex where it lies inside a patch).
std::vector<Patch> split_patches(std::vector<Patch> patches, const std::vector<Vec2>& points);

// Convex polygon (counter-clockwise) to Duffy triangles (fan from vertex 0).
std::vector<Patch> polygon_patches(const std::vector<Vec2>& poly);

double polygon_area(const std::vector<Vec2>& poly);

// Sutherland-Hodgman: keep the part of `poly` where dot(n, x) >= c.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 n, double c);

std::vector<Vec2> box_polygon(const Box& b);

std::vector<Vec2> clip_convex(const std::vector<Vec2>& poly, const std::vector<Vec2>& convex_clip);

}  // namespace dmf
