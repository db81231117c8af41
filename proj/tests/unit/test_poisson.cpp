#include <gtest/gtest.h>

#include "dmfield/poisson.hpp"

using namespace dmf;

namespace {
const Box kWindow({-1.5, -1.5}, {1.5, 1.5});
}

TEST(Poisson, NegativeAtomGivesTheWhitneyField) {
  DMField f = solve_div({RadonMeasure::dirac(kWindow, {0, 0}, -2 * kPi)});
  for (Vec2 x : {Vec2{0.3, 0.1}, Vec2{-0.7, 0.2}, Vec2{0.05, -0.9}}) {
    Vec2 v = f.ac_value(x), e = x / dot(x, x);
    EXPECT_NEAR(norm(v - e), 0.0, 1e-12);
  }
  ASSERT_TRUE(f.divergence.has_value());
  EXPECT_NEAR(integrate(*f.divergence, [](const Vec2&) { return 1.0; }), 2 * kPi, 1e-14);
}

TEST(Poisson, SolveIsLinearInSigma) {
  RadonMeasure a = RadonMeasure::dirac(kWindow, {0.2, 0.1}, 1.3);
  RadonMeasure b = RadonMeasure::lebesgue(Box({-0.5, -0.5}, {0.5, 0.5}), [](const Vec2& x) { return 1 + x.x; });
  b = RadonMeasure(kWindow) + b;
  DMField fa = solve_div({a}), fb = solve_div({b}), fab = solve_div({a * 2.0 + b});
  for (Vec2 x : {Vec2{0.7, 0.6}, Vec2{-1.0, 0.3}, Vec2{0.1, -0.2}}) {
    Vec2 lhs = fab.ac_value(x), rhs = fa.ac_value(x) * 2.0 + fb.ac_value(x);
    EXPECT_NEAR(norm(lhs - rhs), 0.0, 1e-9 * (1 + norm(rhs)));
  }
}

TEST(Poisson, VerifiesAgainstItsSource) {
  RadonMeasure sigma = RadonMeasure::dirac(kWindow, {0.5, 0.4}, 0.7);
  EXPECT_LT(verify_solution(solve_div({sigma}), sigma), 1e-3);
}

TEST(Poisson, WrongSourceFailsVerification) {
  RadonMeasure sigma = RadonMeasure::dirac(kWindow, {0.5, 0.4}, 0.7);
  RadonMeasure other = RadonMeasure::dirac(kWindow, {0.5, 0.4}, 0.8);
  EXPECT_GT(verify_solution(solve_div({sigma}), other), 1e-2);
}

TEST(Poisson, FarFieldDecaysLikeTheTotalMass) {
  RadonMeasure sigma = RadonMeasure::lebesgue(Box({-0.2, -0.2}, {0.2, 0.2}), [](const Vec2&) { return 1 / 0.16; });
  Vec2 v = newtonian_field(sigma, {3, 0});
  EXPECT_NEAR(norm(v) * 2 * kPi * 3, 1.0, 1e-2);
  EXPECT_LT(v.x, 0.0);  // -div F = sigma > 0 pulls inward
}

TEST(Poisson, FieldAtAnAtomIsUndefined) {
  RadonMeasure sigma = RadonMeasure::dirac(kWindow, {0, 0}, 1.0);
  EXPECT_THROW(newtonian_field(sigma, {0, 0}), PreconditionError);
}
