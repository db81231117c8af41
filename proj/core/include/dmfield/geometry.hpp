#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dmfield/measure.hpp"
#include "dmfield/patch.hpp"
#include "dmfield/types.hpp"

namespace dmf {

// Smooth piece of a level curve {d = eps}: a segment or a circular arc, with
// the interior unit normal (pointing into U^eps, i.e. along grad d).
struct BoundaryPiece {
  enum class Kind { segment, arc } kind = Kind::segment;
  Vec2 a, b;                       // segment
  Vec2 center;                     // arc
  double radius = 0.0, th0 = 0.0, th1 = 0.0;
  double normal_sign = 1.0;        // segment: normal = sign * perp(b - a)/|b - a|; arc: sign * radial
  int id = 0;                      // stable label of the generating boundary component

  Vec2 point(double s) const;
  Vec2 deriv(double s) const;
  double speed(double s) const { return norm(deriv(s)); }
  double length() const;
  Vec2 normal(double s) const;
  // parameter of the nearest point (clamped to [0,1])
  double project(const Vec2& x) const;
  BoundaryPiece sub(double s0, double s1) const;
};

struct BoundaryQuadrature {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<Vec2> normals;  // interior unit normals
};

class Shape;

class OpenSet {
 public:
  OpenSet() = default;
  explicit OpenSet(std::shared_ptr<const Shape> s) : s_(std::move(s)) {}

  static OpenSet box(const Box& b);
  static OpenSet ball(Vec2 center, double radius);
  static OpenSet halfplane(Vec2 normal, double offset, const Box& window);
  static OpenSet polygon(const std::vector<Vec2>& vertices);
  // {|x - c| < R, (x - c).n > 0} with n = (-sin a, cos a): half disk whose diameter has direction angle a
  static OpenSet halfdisk(Vec2 center, double radius, double angle = 0.0);
  // disk minus the ray {c + t e1 : t >= 0}
  static OpenSet slitdisk(Vec2 center, double radius);
  static OpenSet intersect(const OpenSet& a, const OpenSet& b);
  static OpenSet unite(const OpenSet& a, const OpenSet& b);
  static OpenSet complement(const Box& window, const OpenSet& a);

  bool valid() const { return static_cast<bool>(s_); }
  std::string kind() const;
  bool contains(const Vec2& x) const;
  bool contains_closure(const Vec2& x) const;
  // distance to the boundary (>= 0 everywhere)
  double dist(const Vec2& x) const;
  // signed distance: + inside, - outside
  double depth(const Vec2& x) const;
  Vec2 grad_dist(const Vec2& x) const;
  // gradient with ridge detection: exact ties are jittered by 1e-12 and flagged
  Vec2 grad_dist_sample(const Vec2& x, bool* on_ridge) const;

  OpenSet interior(double eps) const;
  bool offset_empty(double eps) const { return eps >= max_depth(); }

  // Patches covering U on which grad d is smooth (when exact_patches()).
  std::vector<Patch> area_patches() const;
  // Patches covering {e1 < d <= e2}.
  std::vector<Patch> shell_patches(double e1, double e2) const;
  bool exact_patches() const;
  bool exact_shells() const;

  // Smooth pieces of the level curve {d = eps} (eps = 0: the boundary itself).
  std::vector<BoundaryPiece> boundary(double eps = 0.0) const;
  BoundaryQuadrature boundary_quadrature(double eps = 0.0, int panels = 4, int order = 16) const;
  double max_depth() const;
  std::vector<double> level_breaks() const;

  Box bounds() const;
  Vec2 project(const Vec2& x) const;
  std::vector<Vec2> sample_boundary(int n) const;

  MeasureDomain as_domain(bool closed = false) const;

  const Shape& shape() const { return *s_; }
  std::shared_ptr<const Shape> shape_ptr() const { return s_; }

 private:
  std::shared_ptr<const Shape> s_;
};

// Region descriptor: open set, its closure, a shell, or the exterior within a window.
struct Region {
  enum class Mode { open, closed, shell, exterior } mode = Mode::open;
  OpenSet set;
  double e1 = 0.0, e2 = 0.0;
  Box window;

  static Region open(const OpenSet& u) { return {Mode::open, u, 0, 0, {}}; }
  static Region closed(const OpenSet& u) { return {Mode::closed, u, 0, 0, {}}; }
  static Region shell(const OpenSet& u, double e1, double e2);
  static Region exterior(const OpenSet& u, const Box& window) { return {Mode::exterior, u, 0, 0, window}; }

  bool contains(const Vec2& x) const;
  std::vector<Patch> cells() const;
  bool exact() const;
  MeasureDomain domain() const;
};

Region shell(const OpenSet& u, double e1, double e2);

struct Cube {
  Vec2 a, b;

  OpenSet set() const { return OpenSet::box(Box(a, b)); }
  std::array<Vec2, 4> corners() const { return {a, Vec2{b.x, a.y}, b, Vec2{a.x, b.y}}; }
  Cube translated(Vec2 v) const { return {a + v, b + v}; }
};

struct GoodCubeOptions {
  double radius = 0.0;  // translation ball radius; 0 -> 5% of the smaller side
  double eps0 = 0.02;
  int rungs = 6;
  double tolerance = 0.05;
  int max_draws = 64;
};

struct GoodCubeResult {
  Cube cube;
  int draws = 0;
  std::vector<double> corner_ladder;  // max over corners of (1/eps)|mu|(corner ball inside the cube)
};

GoodCubeResult sample_good_cube(const Cube& q, const RadonMeasure& mu, std::uint64_t seed,
                                const GoodCubeOptions& opt = {});

// Lipschitz test function d_U (zero outside U) with its ridge cells.
TestFunction distance_function(const OpenSet& u);

}  // namespace dmf
