#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dmfield/geometry.hpp"
#include "dmfield/normaltrace.hpp"

namespace dmf {

// A boundary portion is a predicate on boundary points; a null predicate is
// the whole boundary.
using Portion = Predicate;

// Set function (U, S) -> flux of U through the portion S of its boundary,
// with production measure sigma and bounding measure mu.
class CauchyFlux {
 public:
  using Evaluator = std::function<double(const OpenSet&, const Portion&)>;

  CauchyFlux() = default;
  CauchyFlux(Evaluator e, RadonMeasure sigma, RadonMeasure mu, std::string provenance)
      : eval_(std::move(e)), sigma_(std::move(sigma)), mu_(std::move(mu)), provenance_(std::move(provenance)) {}

  double evaluate(const OpenSet& u, const Portion& s = nullptr) const { return eval_(u, s); }
  double operator()(const OpenSet& u, const Portion& s = nullptr) const { return eval_(u, s); }

  const RadonMeasure& sigma() const { return sigma_; }
  const RadonMeasure& mu() const { return mu_; }
  const std::string& provenance() const { return provenance_; }

  // Same flux with the evaluator wrapped (fault injection, sign changes).
  CauchyFlux wrapped(const std::function<double(const OpenSet&, const Portion&, double)>& w) const;

 private:
  Evaluator eval_;
  RadonMeasure sigma_;
  RadonMeasure mu_;
  std::string provenance_;
};

struct FieldFluxOptions {
  bool verify_measure = true;  // refuse portion evaluations on sets failing is_measure_test
  TraceOptions trace;
};

// Flux of the normal trace of F; sigma = -div F, mu = |F_1| + |F_2| unless F carries a bound.
CauchyFlux flux_from_field(const DMField& f, const FieldFluxOptions& opt = {});

struct SliceOptions {
  int t_panels = 24;
  int t_order = 8;
  int cells = 128;       // base partition of each slice (also run at half resolution and extrapolated)
  double atom_density = 1e4;  // cells whose mass per length exceeds this are refined
  int max_refine = 40;
};

// Field whose components satisfy F_j(S) = int Flux(H_{j,+}^t, S on the slice) dt, with the
// half-planes truncated to the window.
DMField field_from_flux(const CauchyFlux& flux, const Box& window, const SliceOptions& opt = {});

// |Flux(U, whole boundary) + div F(U)|
double balance_residual(const CauchyFlux& flux, const DMField& f, const OpenSet& u);

// |Flux(Q, S) - (F.nu)_{dQ}(S)| on a certified good cube.
double local_recovery_residual(const CauchyFlux& flux, const DMField& f, const GoodCubeResult& q, const Portion& s,
                               const TraceOptions& opt = {});

// Trace measure of F on the boundary of U, evaluated on the portion S, as the
// limit of offset traces over the points whose projection lies in S.
TraceResult trace_on_portion(const DMField& f, const OpenSet& u, const Portion& s, const TraceOptions& opt = {});

struct OmuResult {
  bool bounded = true;
  std::vector<double> eps;
  std::vector<double> values;  // (1/eps) mu(U minus closure of U^eps)
};
OmuResult o_mu_test(const OpenSet& u, const RadonMeasure& mu, double eps0 = 0.0, int rungs = 11);

// (1/eps) mu of the part of the eps-shell projecting into S, extrapolated along the ladder.
TraceResult boundary_mu(const OpenSet& u, const RadonMeasure& mu, const Portion& s, double eps0 = 0.0, int rungs = 8);

struct AxiomWitness {
  std::string axiom;
  std::string detail;
  double excess = 0.0;
};

struct AxiomReport {
  int cases = 0;
  int additivity_failures = 0;
  int localization_failures = 0;
  int bound_failures = 0;
  int balance_failures = 0;
  std::vector<AxiomWitness> witnesses;
  bool passed() const {
    return additivity_failures + localization_failures + bound_failures + balance_failures == 0;
  }
};

struct AxiomOptions {
  int cases = 200;
  double tolerance = 1e-6;
  double bound_slack = 1e-3;  // relative slack for the upper bound (ladder-sampled limit)
};

// Randomized checks of additivity, localization, the upper bound and the balance law
// on boxes and balls inside the window of the flux's bounding measure.
AxiomReport axiom_property_suite(const CauchyFlux& flux, std::uint64_t seed, const AxiomOptions& opt = {});

}  // namespace dmf
