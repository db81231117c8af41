#pragma once

#include <vector>

#include "dmfield/divfield.hpp"
#include "dmfield/measure.hpp"

namespace dmf {

// Solves -div F = sigma in the plane with the Newtonian potential,
//   F(x) = -(1/2pi) int (x - y)/|x - y|^2 dsigma(y).
// This is the only constructive route; existence results obtained by duality
// arguments are not implemented.
struct DivergenceProblem {
  RadonMeasure sigma;  // compactly supported in sigma.box()
};

struct PoissonOptions {
  int grid = 6;    // rectangular cells are integrated on a grid x grid partition
  int order = 10;  // fixed Gauss order per cell; the cell holding x is split into Duffy triangles
  Quad1DOptions curve{1e-12, 1e-12, 30, 16, {}};
};

// Pointwise convolution. Throws PreconditionError at an atom of sigma.
Vec2 newtonian_field(const RadonMeasure& sigma, const Vec2& x, const PoissonOptions& opt = {});

// Field on sigma's window with the convolution as density and divergence -sigma.
DMField solve_div(const DivergenceProblem& p, const PoissonOptions& opt = {});

// max over the dictionary of |int grad phi . dF - sigma(phi)|; the dictionary
// defaults to bump_dictionary(F.window).
double verify_solution(const DMField& f, const RadonMeasure& sigma, const std::vector<TestFunction>& dict = {});

}  // namespace dmf
