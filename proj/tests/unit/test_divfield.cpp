#include <gtest/gtest.h>

#include <random>

#include "dmfield/divfield.hpp"
#include "dmfield/geometry.hpp"

using namespace dmf;

namespace {

const Box kSquare({-1, -1}, {1, 1});

DMField smooth_field() {
  return DMField::from_density(kSquare, [](const Vec2& x) { return Vec2{x.x * x.y + 0.3, x.y * x.y - x.x}; },
                               RadonMeasure::lebesgue(kSquare, [](const Vec2& x) { return 3 * x.y; }));
}

DMField whitney(bool stored) {
  std::optional<RadonMeasure> div;
  if (stored) div = RadonMeasure::dirac(kSquare, {0, 0}, 2 * kPi);
  return DMField::from_density(kSquare, [](const Vec2& x) { return x / dot(x, x); }, div, {{0, 0}});
}

}  // namespace

TEST(DivField, DefinitionHoldsOnTheDictionary) {
  DMField f = smooth_field();
  EXPECT_LT(divergence_definition_residual(f, bump_dictionary(kSquare)), 1e-9);
}

TEST(DivField, MollifiedDivergenceMatchesStoredMeasure) {
  DMField f = smooth_field();
  TestFunction phi = TestFunction::bump({0.2, -0.1}, 0.5);
  double stored = divergence_pairing(f, phi).value;
  LimitValue moll = divergence_pairing_mollified(f, phi);
  EXPECT_NEAR(moll.value, stored, 1e-7);
}

TEST(DivField, WhitneyDivergenceIsTwoPiAtTheOrigin) {
  TestFunction phi = TestFunction::bump({0, 0}, 0.5);
  LimitValue v = divergence_pairing(whitney(false), phi);
  EXPECT_NEAR(v.value / (2 * kPi * phi({0, 0})), 1.0, 1e-2);
  EXPECT_TRUE(v.limit);
}

TEST(DivField, ProductRuleForLipschitzFactor) {
  DMField f = smooth_field();
  OpenSet q = OpenSet::box(Box({-0.5, -0.5}, {0.5, 0.5}));
  EXPECT_LT(product_rule_check(f, distance_function(q), TestFunction::bump({0.1, 0}, 0.6)), 1e-6);
}

// |int_U grad phi . F| <= Lip(phi) |F|(U) on random sets and bumps.
TEST(DivField, PairingBoundProperty) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> pos(-0.6, 0.6), rad(0.15, 0.35);
  DMField fields[2] = {smooth_field(), whitney(true)};
  for (int k = 0; k < 12; ++k) {
    Vec2 c{pos(rng), pos(rng)};
    double r = rad(rng);
    OpenSet u = k % 2 ? OpenSet::ball(c, r) : OpenSet::box(Box(c - Vec2{r, r}, c + Vec2{r, r}));
    TestFunction phi = TestFunction::bump({pos(rng), pos(rng)}, rad(rng) + 0.3);
    const DMField& f = fields[k % 2];
    double lhs = pairing_over(f, phi, nullptr, u.as_domain(), {}, true).value;
    double rhs = phi.lip * total_variation(f.bound(), u.as_domain());
    EXPECT_LE(lhs, rhs * (1 + 1e-9) + 1e-12);
  }
}

TEST(DivField, NormLowerBoundIsPositiveAndBelowTheMass) {
  DMField f = smooth_field();
  double lb = dmext_norm_lower_bound(f, bump_dictionary(kSquare));
  EXPECT_GT(lb, 0.0);
  double mass = total_variation(f.bound()) + total_variation(*f.divergence);
  EXPECT_LE(lb, mass * (1 + 1e-9));
}

TEST(DivField, LinearCombinationsCombineDivergences) {
  DMField a = smooth_field(), b = whitney(true);
  DMField c = a * 2.0 + b;
  TestFunction phi = TestFunction::bump({0.1, 0.1}, 0.5);
  EXPECT_NEAR(divergence_pairing(c, phi).value,
              2 * divergence_pairing(a, phi).value + divergence_pairing(b, phi).value, 1e-10);
  EXPECT_NEAR(c.ac_value({0.3, 0.2}).x, 2 * a.ac_value({0.3, 0.2}).x + b.ac_value({0.3, 0.2}).x, 1e-14);
}

TEST(DivField, MollifiedBoxIdentity) {
  DMField f = smooth_field();
  LimitValue v = mollified_divergence_box(f, Box({-0.5, -0.25}, {0.5, 0.75}));
  // int 3 x2 over the box = 3 * 1 * (0.75^2 - 0.25^2) / 2
  EXPECT_NEAR(v.value, 0.75, 1e-6);
}
