#include <gtest/gtest.h>

#include "dmfield/measure.hpp"

using namespace dmf;

namespace {
const Box kSquare({-1, -1}, {1, 1});
}

TEST(Measure, LebesgueIntegratesPolynomials) {
  RadonMeasure m = RadonMeasure::lebesgue(kSquare, [](const Vec2& x) { return x.x * x.x; });
  EXPECT_NEAR(integrate(m, [](const Vec2& x) { return x.y * x.y; }), 4.0 / 9, 1e-12);
}

TEST(Measure, AtomsAndCurvesIntegrateExactly) {
  RadonMeasure m(kSquare);
  m.add(Atom{{0.5, 0.5}, 2.0});
  m.add(CurvePart::segment({-1, 0}, {1, 0}, [](double) { return 3.0; }));
  m.add(CurvePart::arc({0, 0}, 0.5, 0, kPi, [](double) { return 1.0; }));
  auto f = [](const Vec2& x) { return 1.0 + x.x; };
  // atom 2 * 1.5, segment 3 * int_{-1}^{1} (1 + x) dx = 6, half circle: int (1 + 0.5 cos) 0.5 dth = pi/2
  EXPECT_NEAR(integrate(m, f), 3.0 + 6.0 + kPi / 2, 1e-11);
}

TEST(Measure, LinearityOfOperators) {
  RadonMeasure a = RadonMeasure::dirac(kSquare, {0.1, 0.2}, 1.0);
  RadonMeasure b = RadonMeasure::lebesgue(kSquare, [](const Vec2& x) { return x.y; });
  auto f = [](const Vec2& x) { return std::exp(x.x) + x.y; };
  EXPECT_NEAR(integrate(a * 2.0 - b, f), 2 * integrate(a, f) - integrate(b, f), 1e-12);
}

TEST(Measure, TotalVariationCountsNegativeMass) {
  RadonMeasure m = RadonMeasure::lebesgue(kSquare, [](const Vec2& x) { return x.x; });
  m.add(Atom{{0, 0}, -0.5});
  EXPECT_NEAR(total_variation(m), 2.0 + 0.5, 1e-10);
  EXPECT_NEAR(integrate(abs_measure(m), [](const Vec2&) { return 1.0; }), 2.5, 1e-10);
}

TEST(Measure, RestrictionToBoxes) {
  RadonMeasure m = RadonMeasure::lebesgue(kSquare);
  m.add(Atom{{0.5, 0.5}, 1.0});
  m.add(Atom{{-0.5, 0.5}, 1.0});
  RadonMeasure r = restrict(m, MeasureDomain::box(Box({0, 0}, {1, 1})));
  EXPECT_NEAR(integrate(r, [](const Vec2&) { return 1.0; }), 1.0 + 1.0, 1e-12);
}

TEST(Measure, CurveIntervalsFollowThePredicate) {
  CurvePart c = CurvePart::segment({-1, 0}, {1, 0}, [](double) { return 1.0; });
  auto iv = curve_intervals(c, [](const Vec2& x) { return x.x > 0.25; });
  ASSERT_EQ(iv.size(), 1u);
  EXPECT_NEAR(c.at(iv[0].first).x, 0.25, 1e-9);
}

TEST(Measure, MollifiedAtomHasUnitMass) {
  RadonMeasure m = RadonMeasure::dirac(kSquare, {0, 0}, 1.0);
  ScalarFn g = mollify(m, 0.3);
  RadonMeasure dens = RadonMeasure::lebesgue(Box({-0.3, -0.3}, {0.3, 0.3}), g);
  EXPECT_NEAR(integrate(dens, [](const Vec2&) { return 1.0; }), 1.0, 1e-6);
}

TEST(Measure, DictionaryDistanceVanishesOnEqualMeasures) {
  RadonMeasure a = RadonMeasure::lebesgue(kSquare, [](const Vec2& x) { return x.x + 1; });
  auto dict = bump_dictionary(kSquare);
  EXPECT_EQ(dict.size(), 25u);
  EXPECT_NEAR(dictionary_discrepancy(a, a * 1.0, dict), 0.0, 1e-14);
  EXPECT_GT(dictionary_discrepancy(a, a * 1.1, dict), 1e-4);
}

TEST(TestFunctions, BumpAndProductRule) {
  TestFunction b = TestFunction::bump({0.1, 0.2}, 0.5, 2.0);
  EXPECT_NEAR(b({0.1, 0.2}), 2.0, 1e-14);
  EXPECT_EQ(b({0.7, 0.2}), 0.0);
  TestFunction l = TestFunction::linear({1, -1}, 0.0, kSquare);
  TestFunction p = TestFunction::product(b, l);
  Vec2 x{0.2, 0.3};
  double h = 1e-6;
  double fd = (p(x + Vec2{h, 0}) - p(x - Vec2{h, 0})) / (2 * h);
  EXPECT_NEAR(p.grad(x).x, fd, 1e-7);
}
