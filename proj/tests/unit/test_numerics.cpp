#include <gtest/gtest.h>

#include <random>

#include "dmfield/expression.hpp"
#include "dmfield/ladder.hpp"
#include "dmfield/mollifier.hpp"
#include "dmfield/patch.hpp"
#include "dmfield/quadrature.hpp"

using namespace dmf;

TEST(Quadrature, GaussRuleIsExactForPolynomials) {
  for (int order : {2, 5, 8, 16}) {
    const GaussRule& g = gauss_legendre(order);
    for (int p = 0; p < 2 * order; ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
      double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "order " << order << " degree " << p;
    }
  }
}

TEST(Quadrature, AdaptiveHandlesKinksAtBreakpoints) {
  Quad1DOptions o;
  o.breakpoints = {0.3};
  EXPECT_NEAR(integrate_1d([](double x) { return std::abs(x - 0.3); }, 0, 1, o), 0.5 * (0.09 + 0.49), 1e-13);
  EXPECT_NEAR(integrate_1d([](double x) { return std::sqrt(x); }, 0, 1), 2.0 / 3, 1e-10);
}

TEST(Quadrature, NonFiniteSampleThrows) {
  EXPECT_THROW(integrate_1d([](double x) { return 1.0 / (x - 0.5) / 0.0; }, 0, 1), NumericalError);
}

TEST(Quadrature, FixedRuleMatchesClosedForm) {
  EXPECT_NEAR(integrate_1d_fixed([](double x) { return std::exp(x); }, 0, 1, 8, 4), std::exp(1.0) - 1, 1e-14);
}

TEST(Ladder, RichardsonRemovesKnownPowers) {
  LadderOptions lo;
  lo.h0 = 0.5;
  lo.rungs = 6;
  lo.order = 1;
  LadderResult r = run_ladder([](double h) { return 2.0 + 3 * h - 5 * h * h + h * h * h; }, lo);
  EXPECT_NEAR(r.extrapolated, 2.0, 1e-12);
  EXPECT_TRUE(r.converged);
  ASSERT_EQ(r.h.size(), 6u);
  EXPECT_DOUBLE_EQ(r.h[1], 0.25);
}

TEST(Ladder, WeightsReproduceTheExtrapolant) {
  LadderOptions lo;
  lo.h0 = 0.3;
  lo.rungs = 5;
  auto h = ladder_steps(lo);
  std::vector<double> v;
  for (double x : h) v.push_back(std::cos(x));
  auto w = richardson_weights(h, lo);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * v[i];
  EXPECT_NEAR(s, richardson(h, v, lo).extrapolated, 1e-13);
}

TEST(Expression, ParsesAndDifferentiates) {
  Expr e = Expr::parse("x1^2*sin(x2) + atan2(x2, x1) - sqrt(abs(x1))/e", {"x1", "x2"});
  double x = 0.7, y = -0.4;
  EXPECT_NEAR(e.eval({x, y}), x * x * std::sin(y) + std::atan2(y, x) - std::sqrt(x) / std::exp(1.0), 1e-15);
  Expr d = e.derivative(1);
  EXPECT_NEAR(d.eval({x, y}), x * x * std::cos(y) + x / (x * x + y * y), 1e-13);
  EXPECT_NEAR(Expr::parse("-2*pi", {}).eval({}), -2 * kPi, 1e-15);
  EXPECT_TRUE(Expr::parse("3*4", {}).is_constant());
}

TEST(Expression, RejectsMalformedText) {
  EXPECT_THROW(Expr::parse("x1 +", {"x1"}), ConfigError);
  EXPECT_THROW(Expr::parse("y", {"x1"}), ConfigError);
  EXPECT_THROW(Expr::parse("sin(x1", {"x1"}), ConfigError);
}

TEST(Mollifier, HasUnitMass) {
  for (double delta : {1.0, 0.1}) {
    double m = integrate_patches<double>(ball_cells({0.2, -0.1}, delta),
                                         [&](const Vec2& x) { return mollifier(x - Vec2{0.2, -0.1}, delta); });
    EXPECT_NEAR(m, 1.0, 1e-10);
  }
}

TEST(Mollifier, ConvolutionPreservesAffineFunctions) {
  ScalarFn aff = [](const Vec2& x) { return 1.5 * x.x - 0.5 * x.y + 2; };
  EXPECT_NEAR(convolve(aff, {0.3, 0.4}, 0.2), aff({0.3, 0.4}), 1e-10);
  Vec2 g = mollified_gradient(aff, {0.3, 0.4}, 0.2);
  EXPECT_NEAR(g.x, 1.5, 1e-9);
  EXPECT_NEAR(g.y, -0.5, 1e-9);
}

TEST(Patch, SplitAtPointPreservesArea) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Patch r = Patch::rect(Box({0, 0}, {1, 1}));
  for (int k = 0; k < 20; ++k) {
    Vec2 p{u(rng), u(rng)};
    double a = integrate_patches<double>(r.split_at(p), [](const Vec2&) { return 1.0; });
    EXPECT_NEAR(a, 1.0, 1e-13);
  }
}

TEST(Patch, ConvexClipOfSquares) {
  auto c = clip_convex(box_polygon(Box({0, 0}, {2, 2})), box_polygon(Box({1, 1}, {3, 3})));
  EXPECT_NEAR(polygon_area(c), 1.0, 1e-15);
  EXPECT_TRUE(clip_convex(box_polygon(Box({0, 0}, {1, 1})), box_polygon(Box({2, 2}, {3, 3}))).empty());
}
