#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmfield/patch.hpp"
#include "dmfield/types.hpp"

namespace dmf {

enum class TestTag { c1c, lipschitz, borel };

// Test function with its gradient. When `grad_cells` is non-empty the
// gradient is smooth on each cell and vanishes outside their union; this is
// how distance-type Lipschitz functions expose their ridge structure.
struct TestFunction {
  ScalarFn value;
  VectorFn grad;
  double lip = 0.0;
  Box support;
  TestTag tag = TestTag::c1c;
  bool smooth = false;  // gradient continuous everywhere (mollification changes nothing in the limit)
  std::string name;
  std::vector<Patch> grad_cells;

  double operator()(const Vec2& x) const { return value(x); }

  static TestFunction bump(Vec2 center, double radius, double height = 1.0);
  static TestFunction bump1d(double center, double radius, double height = 1.0);
  static TestFunction constant(double c, const Box& support);
  static TestFunction linear(Vec2 a, double b, const Box& support);
  static TestFunction borel(ScalarFn f, const Box& support, std::string name = "borel");
  // (a x) product rule; lip is the crude bound |a|'|b|_inf + |a|_inf |b|'.
  static TestFunction product(const TestFunction& a, const TestFunction& b);
  TestFunction scaled(double s) const;
  // Sup of |value| estimated on a sample grid over the support.
  double sup_estimate(int n = 41) const;
};

// 5 centres x 5 scales of bumps placed inside the window.
std::vector<TestFunction> bump_dictionary(const Box& window);

struct AcPart {
  ScalarFn density;
  std::vector<Patch> cells;  // integration domain; empty = whole support box
  std::vector<Predicate> indicators;  // extra restrictions (multiplicative)
  std::vector<Predicate> domain;      // membership implied by `cells`; used by pointwise queries only
  std::vector<Vec2> singular;  // integrable point singularities of the density
  std::vector<Vec2> kinks;     // points where the density jumps (hints only)
  // Convex counter-clockwise pieces exactly covering the part. When present the density may
  // jump across their edges and field integrals clip them against the integration cells.
  std::vector<std::vector<Vec2>> polygons;
};

struct Atom {
  Vec2 x;
  double w = 0.0;
};

// Curve-supported part: t in [t0,t1] -> gamma(t), with mass per unit
// parameter weight(t) (= arc-length density times |gamma'|).
struct CurvePart {
  std::function<Vec2(double)> gamma;
  std::function<Vec2(double)> dgamma;
  double t0 = 0.0;
  double t1 = 1.0;
  std::vector<double> breaks;
  Fn1 weight;

  Vec2 at(double t) const { return gamma(t); }
  Vec2 tangent(double t) const { return normalized(dgamma(t)); }

  // density is per unit arc length, as a function of the curve parameter
  static CurvePart segment(Vec2 a, Vec2 b, Fn1 density);
  static CurvePart arc(Vec2 center, double radius, double th0, double th1, Fn1 density);
  static CurvePart polyline(const std::vector<Vec2>& pts, Fn1 density);
  CurvePart scaled(double s) const;
};

// Signed Radon measure on a box: absolutely continuous + atoms + curves.
class RadonMeasure {
 public:
  RadonMeasure() = default;
  explicit RadonMeasure(Box box, int dim = 2) : dim_(dim), box_(box) { box_.dim = dim; }

  static RadonMeasure zero(const Box& box, int dim = 2) { return RadonMeasure(box, dim); }
  static RadonMeasure lebesgue(const Box& box, ScalarFn density = nullptr);
  static RadonMeasure dirac(const Box& box, Vec2 x, double w = 1.0);

  RadonMeasure& add(AcPart p);
  RadonMeasure& add(Atom a);
  RadonMeasure& add(CurvePart c);

  int dim() const { return dim_; }
  const Box& box() const { return box_; }
  const std::vector<AcPart>& ac() const { return ac_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<CurvePart>& curves() const { return curves_; }
  bool empty() const { return ac_.empty() && atoms_.empty() && curves_.empty(); }

  std::vector<Vec2> singular_points() const;

  RadonMeasure operator+(const RadonMeasure& o) const;
  RadonMeasure operator*(double s) const;
  RadonMeasure operator-(const RadonMeasure& o) const { return *this + o * -1.0; }

  // Patches over which part `i` is integrated (singular points are Duffy apices).
  std::vector<Patch> ac_cells(std::size_t i) const;

 private:
  int dim_ = 2;
  Box box_;
  std::vector<AcPart> ac_;
  std::vector<Atom> atoms_;
  std::vector<CurvePart> curves_;
};

inline RadonMeasure operator*(double s, const RadonMeasure& m) { return m * s; }

// Where a measure may be restricted to: membership predicate plus, when
// available, integration cells exactly covering the set.
struct MeasureDomain {
  Predicate contains;
  std::vector<Patch> cells;
  std::string name;

  static MeasureDomain box(const Box& b, bool open = true);
  static MeasureDomain everywhere();
};

struct IntegrateOptions {
  Quad2DOptions area;
  Quad1DOptions curve;
};

double integrate(const RadonMeasure& mu, const ScalarFn& f, const IntegrateOptions& opt = {});
double integrate(const RadonMeasure& mu, const TestFunction& f, const IntegrateOptions& opt = {});
double integrate_ac(const RadonMeasure& mu, const ScalarFn& f, const IntegrateOptions& opt = {});
double integrate_atoms(const RadonMeasure& mu, const ScalarFn& f);
double integrate_curves(const RadonMeasure& mu, const ScalarFn& f, const IntegrateOptions& opt = {});

// |mu| as a measure (parts are assumed mutually singular).
RadonMeasure abs_measure(const RadonMeasure& mu);

double total_variation(const RadonMeasure& mu, const MeasureDomain& e, const IntegrateOptions& opt = {});
double total_variation(const RadonMeasure& mu);

RadonMeasure restrict(const RadonMeasure& mu, const MeasureDomain& e);

// Sub-intervals of [c.t0, c.t1] on which `pred` holds along the curve.
std::vector<std::pair<double, double>> curve_intervals(const CurvePart& c, const Predicate& pred, int samples = 512);

// x -> int rho_delta(x - y) dmu(y).
ScalarFn mollify(const RadonMeasure& mu, double delta);

// Weak distance: max over a dictionary of |int psi d(a) - int psi d(b)|.
double dictionary_discrepancy(const RadonMeasure& a, const RadonMeasure& b, const std::vector<TestFunction>& dict);

}  // namespace dmf
