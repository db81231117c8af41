#pragma once

#include <vector>

#include "dmfield/patch.hpp"
#include "dmfield/types.hpp"

namespace dmf {

// Standard mollifier rho(x) = C_n exp(-1/(1-|x|^2)) on |x| < 1, normalised
// numerically so that its integral is one; rho_delta(x) = delta^-n rho(x/delta).
double mollifier_constant(int dim);
double mollifier(const Vec2& z, double delta, int dim = 2);
Vec2 mollifier_grad(const Vec2& z, double delta);

// Quadrature cells covering the delta-ball around x.
std::vector<Patch> ball_cells(const Vec2& x, double delta);

// (f * rho_delta)(x) for a callable f; adaptive when `kinked` is true.
double convolve(const ScalarFn& f, const Vec2& x, double delta, bool kinked = false);

// (grad phi * rho_delta)(x) computed as the integral of phi(x - z) grad rho_delta(z);
// valid for Lipschitz phi, no gradient of phi needed.
Vec2 mollified_gradient(const ScalarFn& phi, const Vec2& x, double delta);

// Same but from a smooth gradient field: integral of grad phi(x - z) rho_delta(z).
Vec2 convolve_gradient(const VectorFn& grad, const Vec2& x, double delta);

}  // namespace dmf
