#include <gtest/gtest.h>

#include <random>

#include "dmfield/normaltrace.hpp"
#include "dmfield/quadrature.hpp"

using namespace dmf;

namespace {

DMField line_field(const Box& w, Vec2 a, Vec2 b) {
  DMField f;
  f.window = w;
  RadonMeasure f1(w);
  f1.add(CurvePart::segment(a, b, [](double) { return 1.0; }));
  f.components = {f1, RadonMeasure::zero(w)};
  RadonMeasure dv(w);
  dv.add(Atom{a, 1.0});
  dv.add(Atom{b, -1.0});
  f.divergence = dv;
  return f;
}

DMField polynomial(const Box& w) {
  return DMField::from_density(
      w, [](const Vec2& x) { return Vec2{x.x * x.x * x.y + x.y * x.y * x.y, x.x * x.y * x.y - x.x}; },
      RadonMeasure::lebesgue(w, [](const Vec2& x) { return 4 * x.x * x.y; }));
}

}  // namespace

TEST(NormalTrace, LineMeasureInteriorAndExterior) {
  Box w({-1, -1}, {2, 1});
  DMField f = line_field(w, {-1, 0}, {2, 0});
  OpenSet q = OpenSet::box(Box({0, 0}, {1, 1}));
  TestFunction phi = TestFunction::bump({0.2, 0.1}, 0.5, 2.0);
  EXPECT_NEAR(trace_functional(f, q, phi).value, 0.0, 1e-8);
  EXPECT_NEAR(exterior_trace(f, q, phi).value, phi({1, 0}) - phi({0, 0}), 1e-8);
  JumpResult j = jump(f, q, phi);
  EXPECT_NEAR(j.value, phi({1, 0}) - phi({0, 0}), 1e-8);
  EXPECT_NEAR(j.value, j.formula, 1e-8);
}

TEST(NormalTrace, ConventionFlipsTheSign) {
  Box w({-1.5, -1.5}, {1.5, 1.5});
  DMField f = polynomial(w);
  OpenSet b = OpenSet::ball({0.1, 0.2}, 0.9);
  TestFunction one = TestFunction::constant(1, w);
  TraceOptions out;
  out.convention = Convention::outward;
  double in = trace_functional(f, b, one).value;
  EXPECT_NEAR(trace_functional(f, b, one, false, out).value, -in, 1e-12);
  // interior-normal trace of 1 is minus the divergence mass: -4 c1 c2 |B|
  EXPECT_NEAR(in, -4 * 0.1 * 0.2 * kPi * 0.81, 1e-8);
}

TEST(NormalTrace, ClassicalGaussGreen) {
  Box w({-1.5, -1.5}, {1.5, 1.5});
  DMField f = polynomial(w);
  TestFunction lin = TestFunction::linear({0.3, -0.7}, 1.2, w);
  for (const OpenSet& u : {OpenSet::ball({0.1, 0.2}, 0.9), OpenSet::box(Box({-0.7, -0.4}, {0.8, 1.1}))})
    EXPECT_NEAR(trace_functional(f, u, lin).value, classical_flux(f, u, lin.value), 1e-8) << u.kind();
}

TEST(NormalTrace, RoutesAgreeOnSmoothFields) {
  Box w({-1, -1}, {1, 1});
  DMField f = DMField::from_density(w, [](const Vec2& x) { return Vec2{x.x * x.y, x.y * x.y - x.x}; },
                                    RadonMeasure::lebesgue(w, [](const Vec2& x) { return 3 * x.y; }));
  OpenSet u = OpenSet::ball({0.1, 0}, 0.5);
  TestFunction phi = TestFunction::bump({0.2, 0.1}, 0.6);
  double a = trace_functional(f, u, phi).value;
  EXPECT_NEAR(trace_limit(f, u, phi).value, a, 1e-6);
  EXPECT_NEAR(trace_averaged(f, u, phi).value, a, 1e-5);
}

TEST(NormalTrace, WhitneyHalfPlaneAtom) {
  Box w({-1, -1}, {1, 1});
  DMField f = DMField::from_density(w, [](const Vec2& x) { return x / dot(x, x); },
                                    RadonMeasure::dirac(w, {0, 0}, 2 * kPi), {{0, 0}});
  TraceOptions to;
  to.convention = Convention::outward;
  TestFunction phi = TestFunction::bump({0.1, 0.2}, 0.6);
  TraceResult r = trace_limit(f, OpenSet::halfplane({1, 0}, 0, w), phi, to);
  EXPECT_NEAR(r.value / (-kPi * phi({0, 0})), 1.0, 1e-2);
  EXPECT_FALSE(r.ladder_h.empty());
}

TEST(NormalTrace, SupportTheorem) {
  Box w({-1, -1}, {1, 1});
  DMField f = DMField::from_density(w, [](const Vec2& x) { return Vec2{x.y + 1, x.x * x.x}; },
                                    RadonMeasure::lebesgue(w, [](const Vec2&) { return 0.0; }));
  OpenSet u = OpenSet::ball({0, 0}, 0.5);
  TestFunction phi = TestFunction::product(TestFunction::bump({0.1, 0}, 1.2), distance_function(u));
  EXPECT_LT(support_check(f, u, false, phi), 1e-8);
  EXPECT_LT(support_check(f, u, true, phi), 1e-8);
}

TEST(NormalTrace, SlitDiskLocalization) {
  Box w({-1.5, -1.5}, {1.5, 1.5});
  DMField f = DMField::from_density(w, [](const Vec2&) { return Vec2{0, 1}; }, RadonMeasure::zero(w));
  TestFunction phi = TestFunction::bump({0.5, 0}, 0.3);
  double segment = integrate_1d([&](double x) { return phi({x, 0}); }, 0.2, 0.8);
  EXPECT_NEAR(trace_functional(f, OpenSet::halfdisk({0, 0}, 1), phi).value, segment, 1e-6);
  EXPECT_NEAR(trace_functional(f, OpenSet::slitdisk({0, 0}, 1), phi).value, 0.0, 1e-6);
}

TEST(NormalTrace, LocalizationOnAgreeingSets) {
  Box w({-1.5, -1.5}, {1.5, 1.5});
  DMField f = polynomial(w);
  OpenSet u = OpenSet::ball({0, 0}, 1), v = OpenSet::intersect(u, OpenSet::box(Box({-0.5, -1.2}, {1.2, 1.2})));
  OpenSet a = OpenSet::box(Box({0.2, -1.2}, {1.2, 1.2}));
  TestFunction phi = TestFunction::bump({0.8, 0}, 0.35);
  EXPECT_LT(localization_check(f, u, v, a, phi), 1e-8);
  // hypothesis violated: U and V differ inside A
  OpenSet far = OpenSet::ball({0, 0}, 0.7);
  EXPECT_THROW(localization_check(f, u, far, a, phi), PreconditionError);
}

TEST(NormalTrace, CoareaIdentity) {
  Box w({-1, -1}, {1, 1});
  DMField f = DMField::from_density(w, [](const Vec2& x) { return Vec2{-x.y, x.x}; }, RadonMeasure::zero(w));
  CoareaResult r = coarea_check(f, OpenSet::polygon({{-0.5, -0.5}, {0.6, -0.4}, {0.2, 0.7}}),
                                TestFunction::bump({0, 0}, 0.9));
  EXPECT_LT(r.residual, 1e-4);
}

TEST(NormalTrace, BadOffsetsAreAvoided) {
  Box w({-1, -1}, {2, 1});
  DMField f = line_field(w, {-1, 0.25}, {2, 0.25});
  OpenSet q = OpenSet::box(Box({0, 0}, {1, 1}));
  auto bad = bad_offsets(f, q);
  ASSERT_FALSE(bad.empty());
  EXPECT_FALSE(is_good_offset(f, q, 0.25));
  double g = nearest_good_offset(f, q, 0.25);
  EXPECT_TRUE(is_good_offset(f, q, g));
  EXPECT_NEAR(g, 0.25, 0.05);
}

TEST(NormalTrace, MeasureVerdictForBoundedFields) {
  Box w({-1, -1}, {1, 1});
  DMField f = DMField::from_density(w, [](const Vec2& x) { return Vec2{x.y, 1.0}; }, RadonMeasure::zero(w));
  MeasureVerdict v = is_measure_test(f, OpenSet::ball({0, 0}, 0.5));
  EXPECT_TRUE(v.bounded);
}
