#pragma once

#include <vector>

#include "dmfield/types.hpp"

namespace dmf {

// Gauss-Legendre rule on [-1,1]; cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

struct Quad1DOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  int max_depth = 40;
  int order = 16;
  // Interior points where the integrand is allowed to be non-smooth. The
  // interval is always split there before adaptive bisection starts.
  std::vector<double> breakpoints;
};

// Adaptive composite Gauss-Legendre. Throws NumericalError on a non-finite sample.
double integrate_1d(const Fn1& f, double a, double b, const Quad1DOptions& opt = {});

// Fixed composite rule: `panels` equal panels with `order` nodes each.
double integrate_1d_fixed(const Fn1& f, double a, double b, int order, int panels);

// Nodes/weights of the fixed composite rule (for callers that cache samples).
void composite_rule(double a, double b, int order, int panels, std::vector<double>& x, std::vector<double>& w);

[[noreturn]] void throw_singular_node();

inline void check_finite(double v) {
  if (!std::isfinite(v)) throw_singular_node();
}

}  // namespace dmf
