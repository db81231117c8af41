#include <benchmark/benchmark.h>

#include "dmfield/cauchyflux.hpp"
#include "dmfield/entropy.hpp"
#include "dmfield/poisson.hpp"
#include "dmfield/quadrature.hpp"

using namespace dmf;

namespace {

const Box kSquare({-1, -1}, {1, 1});

DMField smooth_field() {
  return DMField::from_density(kSquare, [](const Vec2& x) { return Vec2{x.x * x.y + 0.3, x.y * x.y - x.x}; },
                               RadonMeasure::lebesgue(kSquare, [](const Vec2& x) { return 3 * x.y; }));
}

DMField whitney() {
  return DMField::from_density(kSquare, [](const Vec2& x) { return x / dot(x, x); },
                               RadonMeasure::dirac(kSquare, {0, 0}, 2 * kPi), {{0, 0}});
}

void BM_Quadrature1D(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(integrate_1d([](double x) { return std::exp(-x * x); }, -2, 2));
}
BENCHMARK(BM_Quadrature1D);

void BM_LebesgueIntegral(benchmark::State& state) {
  RadonMeasure m = RadonMeasure::lebesgue(kSquare, [](const Vec2& x) { return 1 + x.x * x.y; });
  for (auto _ : state) benchmark::DoNotOptimize(integrate(m, [](const Vec2& x) { return std::cos(x.x + x.y); }));
}
BENCHMARK(BM_LebesgueIntegral);

void BM_DivergencePairing(benchmark::State& state) {
  DMField f = smooth_field();
  TestFunction phi = TestFunction::bump({0.1, -0.1}, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(divergence_pairing(f, phi).value);
}
BENCHMARK(BM_DivergencePairing)->Unit(benchmark::kMillisecond);

void BM_TraceFunctionalBall(benchmark::State& state) {
  DMField f = smooth_field();
  OpenSet u = OpenSet::ball({0.1, 0}, 0.5);
  TestFunction phi = TestFunction::bump({0.2, 0.1}, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(trace_functional(f, u, phi).value);
}
BENCHMARK(BM_TraceFunctionalBall)->Unit(benchmark::kMillisecond);

void BM_TraceLimitWhitneyHalfplane(benchmark::State& state) {
  DMField f = whitney();
  OpenSet h = OpenSet::halfplane({1, 0}, 0, kSquare);
  TestFunction phi = TestFunction::bump({0, 0}, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(trace_limit(f, h, phi).value);
}
BENCHMARK(BM_TraceLimitWhitneyHalfplane)->Unit(benchmark::kMillisecond);

void BM_BalanceResidual(benchmark::State& state) {
  DMField f = smooth_field();
  CauchyFlux flux = flux_from_field(f);
  OpenSet u = OpenSet::box(Box({-0.5, -0.4}, {0.6, 0.5}));
  for (auto _ : state) benchmark::DoNotOptimize(balance_residual(flux, f, u));
}
BENCHMARK(BM_BalanceResidual)->Unit(benchmark::kMillisecond);

void BM_NewtonianField(benchmark::State& state) {
  RadonMeasure sigma = RadonMeasure::lebesgue(Box({-0.3, -0.3}, {0.3, 0.3}), [](const Vec2& x) { return 1 + x.x; });
  for (auto _ : state) benchmark::DoNotOptimize(newtonian_field(sigma, {0.1, 0.05}));
}
BENCHMARK(BM_NewtonianField)->Unit(benchmark::kMillisecond);

void BM_EntropyProductionBox(benchmark::State& state) {
  PiecewiseSolution sol = PiecewiseSolution::burgers_riemann(1, 0, 2, -1, 2);
  EntropyProduction ep = entropy_production_mollified(sol, EntropyPair::burgers_energy());
  for (auto _ : state) benchmark::DoNotOptimize(ep.on_box(Box({0.5, -0.5}, {1.5, 1.5})).value);
}
BENCHMARK(BM_EntropyProductionBox)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
