#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmfield/ladder.hpp"
#include "dmfield/measure.hpp"
#include "dmfield/types.hpp"

namespace dmf {

// Vector-valued Radon measure with a measure divergence. When `divergence`
// is empty the divergence is approximated by mollification on demand.
struct DMField {
  std::vector<RadonMeasure> components;
  std::optional<RadonMeasure> divergence;
  std::optional<RadonMeasure> mu_bound;
  Box window;
  std::string name;

  static DMField zero(const Box& window);
  // Absolutely continuous field with pointwise density f (singular points are Duffy apices).
  static DMField from_density(const Box& window, const VectorFn& f, std::optional<RadonMeasure> div,
                              std::vector<Vec2> singular = {});

  bool analytic() const { return divergence.has_value(); }
  // Sum of the absolutely continuous densities at x.
  Vec2 ac_value(const Vec2& x) const;
  bool has_singular_part() const;
  // Registered singular points of the densities.
  std::vector<Vec2> ac_singular_points() const;
  std::vector<Vec2> ac_kinks() const;
  // Controlling measure: mu_bound if present, else |F_1| + |F_2|.
  RadonMeasure bound() const;

  DMField operator*(double s) const;
  DMField operator+(const DMField& o) const;
};

struct PairingOptions {
  LadderOptions delta{0.0, 0.5, 7, 1.0, 1.0, 4, 1e-7};  // h0 = 0: window scale / 8
  Quad2DOptions area{1e-11, 1e-11, 8, 9};
  Quad1DOptions curve;
};

// A value that may be the limit of a ladder.
struct LimitValue {
  double value = 0.0;
  bool converged = true;
  bool limit = false;  // true when `ladder` was needed
  LadderResult ladder;
  std::string route;
  std::string diagnostic;
};

// Integral over `dom` of psi d(grad phi . F) (pairing measure). With `absolute`
// the variation |grad phi . F| is integrated instead.
LimitValue pairing_over(const DMField& f, const TestFunction& phi, const ScalarFn& psi, const MeasureDomain& dom,
                        const PairingOptions& opt = {}, bool absolute = false);

// <div F, phi>: the stored divergence, or the mollified limit when the field has none.
LimitValue divergence_pairing(const DMField& f, const TestFunction& phi, const PairingOptions& opt = {});
// Always the mollified route: lim -int (grad phi * rho_delta) . dF.
LimitValue divergence_pairing_mollified(const DMField& f, const TestFunction& phi, const PairingOptions& opt = {});

// int psi d(grad phi . F) over the whole window.
LimitValue pairing_integrate(const DMField& f, const TestFunction& phi, const ScalarFn& psi,
                             const PairingOptions& opt = {});

// |<div(phi F), psi> - int psi phi d div F - pairing(F, phi, psi)|
double product_rule_check(const DMField& f, const TestFunction& phi, const TestFunction& psi,
                          const PairingOptions& opt = {});

// Lower bound of |F|(window) + |div F|(window) from a dictionary.
double dmext_norm_lower_bound(const DMField& f, const std::vector<TestFunction>& dict, const PairingOptions& opt = {});

// max over the dictionary of |int phi d div F + int grad phi . dF|.
double divergence_definition_residual(const DMField& f, const std::vector<TestFunction>& dict);

// int grad phi . dF for C^1 phi.
double grad_pairing(const DMField& f, const TestFunction& phi, const Quad2DOptions& area = {1e-11, 1e-11, 8, 9});

// int_dom phi d(div F); mollified ladder when the divergence is not stored.
LimitValue divergence_integral(const DMField& f, const ScalarFn& phi, const MeasureDomain& dom,
                               const PairingOptions& opt = {});

// x -> sum_j int d_j rho_delta(x - y) dF_j(y)
ScalarFn mollified_divergence(const DMField& f, double delta);

// lim_delta int_S (div F * rho_delta) dx for a box S, through the identity
// int_S div F_delta = -int grad(1_S * rho_delta) . dF.
LimitValue mollified_divergence_box(const DMField& f, const Box& s, const PairingOptions& opt = {});

}  // namespace dmf
