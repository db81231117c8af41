#include <gtest/gtest.h>

#include "dmfield/entropy.hpp"

using namespace dmf;

TEST(Entropy, BurgersEnergyPairIsCompatibleAndConvex) {
  PairCheck c = check_pair(EntropyPair::burgers_energy(), ScalarFlux::burgers(), -2, 2);
  EXPECT_LT(c.compatibility, 1e-12);
  EXPECT_GT(c.min_convexity, 0.0);
}

TEST(Entropy, IncompatiblePairIsReported) {
  EntropyPair p = EntropyPair::burgers_energy();
  p.q = [](double u) { return u * u * u / 2; };
  p.dq = [](double u) { return 1.5 * u * u; };
  EXPECT_GT(check_pair(p, ScalarFlux::burgers(), -2, 2).compatibility, 0.1);
}

TEST(Entropy, RiemannShockSatisfiesRankineHugoniot) {
  PiecewiseSolution s = PiecewiseSolution::burgers_riemann(1, 0, 2, -1, 2);
  EXPECT_LT(s.rankine_hugoniot_residual(), 1e-12);
  EXPECT_LT(s.pde_residual(), 1e-8);
  EXPECT_NO_THROW(s.validate());
  EXPECT_DOUBLE_EQ(s.state({1.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(s.state({1.0, 1.0}), 0.0);
}

TEST(Entropy, WrongShockSpeedIsRejected) {
  PiecewiseSolution s = PiecewiseSolution::burgers_riemann(1, 0, 2, -1, 2);
  // move the shock to speed 1: regions and curve both follow x = t
  s.shocks[0].curve = {{0, 0}, {2, 2}};
  s.regions[0].polygon = {{0, -1}, {2, -1}, {2, 2}, {0, 0}};
  s.regions[1].polygon = {{0, 0}, {2, 2}, {2, 2}, {0, 2}};
  EXPECT_GT(s.rankine_hugoniot_residual(), 0.1);
  EXPECT_THROW(s.validate(), PreconditionError);
}

TEST(Entropy, AnalyticProductionOfTheShock) {
  PiecewiseSolution s = PiecewiseSolution::burgers_riemann(1, 0, 2, -1, 2);
  RadonMeasure sig = entropy_production(s, EntropyPair::burgers_energy());
  // xdot [eta] - [q] = 1/2 * 1/2 - 1/3 = -1/12 per unit time, sigma = 1/12
  EXPECT_NEAR(integrate(sig, [](const Vec2&) { return 1.0; }), 2.0 / 12, 1e-12);
  RadonMeasure cons = entropy_production(s, EntropyPair::identity(s.flux));
  EXPECT_NEAR(total_variation(cons), 0.0, 1e-14);
}

TEST(Entropy, MollifiedProductionOnAUnitTimeBox) {
  PiecewiseSolution s = PiecewiseSolution::burgers_riemann(1, 0, 2, -1, 2);
  EntropyProduction ep = entropy_production_mollified(s, EntropyPair::burgers_energy());
  EXPECT_NEAR(ep.on_box(Box({0.5, -0.5}, {1.5, 1.5})).value, 1.0 / 12, 1e-6);
  TestFunction phi = TestFunction::bump({1.0, 0.5}, 0.3);
  EXPECT_NEAR(ep.evaluate(phi).value, integrate(ep.analytic, phi), 1e-6);
  EXPECT_GE(ep.evaluate(phi).value, -1e-9);
}

TEST(Entropy, ConservationHasNoProduction) {
  PiecewiseSolution s = PiecewiseSolution::burgers_riemann(1, 0, 2, -1, 2);
  EntropyProduction ep = entropy_production_mollified(s, EntropyPair::identity(s.flux));
  EXPECT_NEAR(ep.on_box(Box({0.5, -0.5}, {1.5, 1.5})).value, 0.0, 1e-9);
}

TEST(Entropy, RarefactionIsSmooth) {
  PiecewiseSolution r = PiecewiseSolution::burgers_riemann(0, 1, 2, -1, 3);
  EXPECT_TRUE(r.shocks.empty());
  EXPECT_NO_THROW(r.validate());
  EXPECT_NEAR(r.state({1.0, 0.5}), 0.5, 1e-14);
  EXPECT_NEAR(total_variation(entropy_production(r, EntropyPair::burgers_energy())), 0.0, 1e-14);
}

TEST(Entropy, TraceJumpAcrossTheShock) {
  PiecewiseSolution s = PiecewiseSolution::burgers_riemann(1, 0, 2, -1, 2);
  ShockJump j = shock_trace_jump(s, EntropyPair::burgers_energy(), 0, TestFunction::bump({1.0, 0.5}, 0.3));
  EXPECT_NEAR(j.value, j.expected, 1e-6);
  EXPECT_LT(j.expected, 0.0);
}

TEST(Entropy, FluxOnFullBoundariesIsTheProduction) {
  PiecewiseSolution s = PiecewiseSolution::burgers_riemann(1, 0, 2, -1, 2);
  CauchyFlux f = cauchy_entropy_flux(s, EntropyPair::burgers_energy());
  // the box meets the shock x = t/2 for t in [0.4, 1.2]
  EXPECT_NEAR(f(OpenSet::box(Box({0.4, 0.0}, {1.2, 1.0}))), 0.8 / 12, 1e-6);
  EXPECT_NEAR(f(OpenSet::box(Box({0.2, 0.5}, {0.6, 1.5}))), 0.0, 1e-8);
}
