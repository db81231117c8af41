#include <gtest/gtest.h>

#include <random>

#include "dmfield/cauchyflux.hpp"

using namespace dmf;

namespace {

const Box kSquare({-1, -1}, {1, 1});

DMField smooth_field() {
  return DMField::from_density(kSquare, [](const Vec2& x) { return Vec2{x.x * x.y + 0.3, x.y * x.y - x.x}; },
                               RadonMeasure::lebesgue(kSquare, [](const Vec2& x) { return 3 * x.y; }));
}

}  // namespace

TEST(CauchyFlux, BalanceLawOnShapes) {
  DMField f = smooth_field();
  CauchyFlux flux = flux_from_field(f);
  for (const OpenSet& u : {OpenSet::box(Box({-0.5, -0.4}, {0.6, 0.5})), OpenSet::ball({0.1, -0.1}, 0.6),
                           OpenSet::halfdisk({0, 0}, 0.7, 0.3)})
    EXPECT_LT(balance_residual(flux, f, u), 1e-6) << u.kind();
}

TEST(CauchyFlux, AdditivityOverBoundaryPortions) {
  DMField f = smooth_field();
  CauchyFlux flux = flux_from_field(f);
  OpenSet u = OpenSet::ball({0, 0}, 0.6);
  Portion upper = [](const Vec2& x) { return x.y > 0; };
  Portion lower = [](const Vec2& x) { return x.y <= 0; };
  EXPECT_NEAR(flux(u, upper) + flux(u, lower), flux(u), 1e-8);
}

TEST(CauchyFlux, AxiomSuitePassesForATrueFlux) {
  AxiomOptions ao;
  ao.cases = 8;
  AxiomReport r = axiom_property_suite(flux_from_field(smooth_field()), 4, ao);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.cases, 8);
}

// A flux scaled by 1.01 breaks the balance law against the true divergence.
TEST(CauchyFlux, FaultInjectionIsDetected) {
  CauchyFlux good = flux_from_field(smooth_field());
  CauchyFlux bad = good.wrapped([](const OpenSet&, const Portion&, double v) { return 1.01 * v; });
  AxiomOptions ao;
  ao.cases = 8;
  AxiomReport r = axiom_property_suite(bad, 4, ao);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.balance_failures, 0);
  EXPECT_FALSE(r.witnesses.empty());
}

TEST(CauchyFlux, RoundTripRecoversASmoothField) {
  DMField f = DMField::from_density(kSquare, [](const Vec2& x) { return Vec2{x.y, x.x}; }, RadonMeasure::zero(kSquare));
  DMField back = field_from_flux(flux_from_field(f), kSquare);
  auto dict = bump_dictionary(kSquare);
  for (int j = 0; j < 2; ++j) EXPECT_LT(dictionary_discrepancy(back.components[j], f.components[j], dict), 1e-3);
}

TEST(CauchyFlux, LocalRecoveryOnAGoodCube) {
  DMField f = smooth_field();
  CauchyFlux flux = flux_from_field(f);
  GoodCubeResult q = sample_good_cube({{-0.3, -0.3}, {0.3, 0.3}}, f.bound(), 9);
  Portion right = [c = q.cube](const Vec2& x) { return x.x > c.b.x - 1e-9; };
  EXPECT_LT(local_recovery_residual(flux, f, q, right), 1e-6);
}

TEST(CauchyFlux, OmuShellsOfCompositesAreBoundedByTheParts) {
  RadonMeasure mu = smooth_field().bound();
  OpenSet a = OpenSet::ball({0, 0}, 0.4), b = OpenSet::box(Box({0.1, -0.3}, {0.7, 0.3}));
  OmuResult ra = o_mu_test(a, mu, 0.05, 4), rb = o_mu_test(b, mu, 0.05, 4);
  OmuResult ri = o_mu_test(OpenSet::intersect(a, b), mu, 0.05, 4);
  EXPECT_TRUE(ra.bounded && rb.bounded && ri.bounded);
  for (std::size_t k = 0; k < ri.values.size(); ++k)
    EXPECT_LE(ri.values[k], (ra.values[k] + rb.values[k]) * (1 + 1e-6));
  // a ball shell carries about the perimeter times the density
  EXPECT_GT(ra.values.back(), 0.0);
}

TEST(CauchyFlux, EmptyIntersectionHasNoShell) {
  RadonMeasure mu = smooth_field().bound();
  OmuResult r = o_mu_test(OpenSet::intersect(OpenSet::ball({-0.5, 0}, 0.2), OpenSet::ball({0.5, 0}, 0.2)), mu);
  EXPECT_TRUE(r.bounded);
  EXPECT_TRUE(r.values.empty());
}

TEST(CauchyFlux, BoundaryMuOfAUniformDensity) {
  RadonMeasure mu = RadonMeasure::lebesgue(kSquare);
  TraceResult r = boundary_mu(OpenSet::ball({0, 0}, 0.5), mu, nullptr);
  EXPECT_NEAR(r.value, 2 * kPi * 0.5, 1e-4);
}
