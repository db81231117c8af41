#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmfield/divfield.hpp"
#include "dmfield/geometry.hpp"

namespace dmf {

struct TraceOptions {
  Convention convention = Convention::interior;
  PairingOptions pairing;
  LadderOptions eps{0.0, 0.5, 7, 1.0, 1.0, 4, 1e-6};  // h0 = 0: a quarter of the largest depth
  Quad1DOptions boundary{1e-12, 1e-12, 30, 16, {}};
  double good_eps_tol = 1e-9;
};

struct TraceResult {
  double value = 0.0;
  std::vector<double> ladder_h;
  std::vector<double> ladder_raw;
  double extrapolated = 0.0;
  bool converged = true;
  double residual = 0.0;
  std::string diagnostic;
  std::string route;
  std::optional<RadonMeasure> measure;
  std::optional<double> reference;
};

// <F.nu, phi> on the boundary of U (closed = false) or of its closure.
TraceResult trace_functional(const DMField& f, const OpenSet& u, const TestFunction& phi, bool closed = false,
                             const TraceOptions& opt = {});
// Exterior normal trace: minus the trace on the boundary of the closure.
TraceResult exterior_trace(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt = {});

// Depths at which registered atoms, curve endpoints, singular points or
// level-set-aligned curves meet the offset boundaries.
std::vector<double> bad_offsets(const DMField& f, const OpenSet& u);
bool is_good_offset(const DMField& f, const OpenSet& u, double eps, const TraceOptions& opt = {});
// Smallest perturbation eps * (1 + 0.01 j) that is good.
double nearest_good_offset(const DMField& f, const OpenSet& u, double eps, const TraceOptions& opt = {});

// int phi d(F.nu) over the offset boundary, optionally restricted to `keep`.
double offset_trace(const DMField& f, const OpenSet& u, double eps, const ScalarFn& phi, const Predicate& keep = nullptr,
                    const TraceOptions& opt = {});

TraceResult trace_measure_on_offset(const DMField& f, const OpenSet& u, double eps, const TraceOptions& opt = {});

TraceResult trace_limit(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt = {});

TraceResult trace_averaged(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt = {});

struct MeasureVerdict {
  bool bounded = true;
  double bound = 0.0;
  std::vector<double> eps;
  std::vector<double> values;
};
MeasureVerdict is_measure_test(const DMField& f, const OpenSet& u, const TraceOptions& opt = {});

struct CoareaResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};
CoareaResult coarea_check(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt = {});

struct JumpResult {
  double value = 0.0;    // open trace minus closed trace
  double formula = 0.0;  // pairing and divergence mass on the boundary
  double open_trace = 0.0;
  double closed_trace = 0.0;
};
JumpResult jump(const DMField& f, const OpenSet& u, const TestFunction& phi, const TraceOptions& opt = {});

// |trace on U - trace on V| for phi supported in A where U and A agree with V and A.
// With `verify` the hypothesis is checked on random samples (PreconditionError on a mismatch).
double localization_check(const DMField& f, const OpenSet& u, const OpenSet& v, const OpenSet& a,
                           const TestFunction& phi, bool verify = true, std::uint64_t seed = 7,
                           const TraceOptions& opt = {});

// |<F.nu, phi>| for phi vanishing on the boundary.
double support_check(const DMField& f, const OpenSet& e, bool closed, const TestFunction& phi,
                     const TraceOptions& opt = {});

// Mass of the trace concentrated at a boundary point p: limit of the offset
// traces inside B_r(p) minus the classical boundary flux inside B_r(p).
TraceResult corner_atom(const DMField& f, const OpenSet& u, Vec2 p, double radius, const TraceOptions& opt = {});

// Classical int phi F.nu over the boundary (the absolutely continuous density only).
double classical_flux(const DMField& f, const OpenSet& u, const ScalarFn& phi, double eps = 0.0,
                      const Predicate& keep = nullptr, const TraceOptions& opt = {});

}  // namespace dmf
