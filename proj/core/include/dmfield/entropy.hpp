#pragma once

#include <string>
#include <vector>

#include "dmfield/cauchyflux.hpp"
#include "dmfield/divfield.hpp"
#include "dmfield/normaltrace.hpp"

namespace dmf {

// Space-time points are Vec2{t, x}.

struct ScalarFlux {
  Fn1 f;
  Fn1 df;
  std::string name;

  static ScalarFlux burgers();  // u^2 / 2
};

// Entropy eta with flux q; q' = eta' f' is checked, not assumed.
struct EntropyPair {
  Fn1 eta, deta, ddeta;
  Fn1 q, dq;
  std::string name;

  static EntropyPair identity(const ScalarFlux& f);  // (u, f(u))
  static EntropyPair burgers_energy();                // (u^2/2, u^3/3)
};

// max |q'(s) - eta'(s) f'(s)| and min eta''(s) on a uniform grid of [lo, hi].
struct PairCheck {
  double compatibility = 0.0;
  double min_convexity = 0.0;
};
PairCheck check_pair(const EntropyPair& pair, const ScalarFlux& flux, double lo, double hi, int n = 201);

struct SolutionRegion {
  std::vector<Vec2> polygon;  // convex, either orientation
  std::function<double(double t, double x)> u;
};

// Shock x = x_s(t) as a polyline with increasing t; the speed is constant on each segment.
struct Shock {
  std::vector<Vec2> curve;
  Fn1 left;   // u at (t, x_s(t) - 0)
  Fn1 right;  // u at (t, x_s(t) + 0)
};

struct PiecewiseSolution {
  ScalarFlux flux;
  std::vector<SolutionRegion> regions;
  std::vector<Shock> shocks;
  Box window;  // [0,T] x [a,b]

  // State at a point (first region containing it). Throws PreconditionError outside all regions.
  double state(const Vec2& p) const;
  // max over shocks and samples of |xdot (u_l - u_r) - (f(u_l) - f(u_r))|
  double rankine_hugoniot_residual(int samples = 32) const;
  // max over regions of |u_t + f(u)_x| at interior samples (central differences)
  double pde_residual(int samples = 12) const;
  // Throws PreconditionError when either residual exceeds its tolerance (1e-10, 1e-8).
  void validate() const;

  // Burgers Riemann data on [0,T] x [a,b]: a shock for ul > ur, a centred rarefaction otherwise.
  static PiecewiseSolution burgers_riemann(double ul, double ur, double T, double a, double b);
};

// G = (eta(u), q(u)) over (t, x) with its analytic divergence: zero inside the regions and
// (xdot [eta] - [q]) per unit t on each shock, [a] = a_left - a_right.
DMField spacetime_field(const PiecewiseSolution& sol, const EntropyPair& pair);

// sigma_eta = -div G as a measure on the shocks (density -(xdot [eta] - [q]) per unit t).
RadonMeasure entropy_production(const PiecewiseSolution& sol, const EntropyPair& pair);

// Entropy production recovered by mollification, with the analytic measure alongside.
struct EntropyProduction {
  RadonMeasure analytic;
  DMField field;  // G without a stored divergence

  // sigma_eta(phi) = lim int (grad phi * rho_delta) . dG
  LimitValue evaluate(const TestFunction& phi) const;
  // sigma_eta(S) = -lim int_S div(G * rho_delta) for a box S inside the window
  LimitValue on_box(const Box& s) const;
  // max over the dictionary (default bump_dictionary(window)) of |evaluate(phi) - analytic(phi)|
  double discrepancy(const std::vector<TestFunction>& dict = {}) const;
  // min over the dictionary of evaluate(phi); the dictionary must be non-negative
  double min_value(const std::vector<TestFunction>& dict = {}) const;
};
EntropyProduction entropy_production_mollified(const PiecewiseSolution& sol, const EntropyPair& pair);

struct ShockJump {
  double value = 0.0;     // open minus closed trace of G on the strip left of the shock
  double expected = 0.0;  // int phi (xdot [eta] - [q]) / sqrt(1 + xdot^2) dH1 along the shock
  double open_trace = 0.0;
  double closed_trace = 0.0;
};
// `width` is the strip width in x; phi should vanish near the shock end points.
ShockJump shock_trace_jump(const PiecewiseSolution& sol, const EntropyPair& pair, std::size_t shock,
                           const TestFunction& phi, double width = 0.1, const TraceOptions& opt = {});

// F_U(S) = -((eta(u), q(u)) . nu)_{dU}(S); on full boundaries it equals sigma_eta(U).
CauchyFlux cauchy_entropy_flux(const PiecewiseSolution& sol, const EntropyPair& pair);

}  // namespace dmf
