#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "slitlab/quadrature.hpp"

using namespace slitlab;

TEST(Quadrature, AdaptiveSimpsonIsExactOnCubics) {
  const auto f = [](double x) { return 3.0 * x * x * x - x + 2.0; };
  const auto r = quad::adaptive_simpson(f, -1.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 3.0 * (16.0 - 1.0) / 4.0 - (4.0 - 1.0) / 2.0 + 6.0, 1e-13);
}

TEST(Quadrature, AdaptiveSimpsonSine) {
  EXPECT_NEAR(quad::integrate([](double x) { return std::sin(x); }, 0.0, M_PI), 2.0, 1e-10);
}

TEST(Quadrature, BreakpointsShareTheTolerance) {
  const std::vector<double> pts{0.0, 1.0, 2.0, 3.0};
  const double v = quad::integrate([](double x) { return std::exp(-x); }, pts, {1e-12, 40});
  EXPECT_NEAR(v, 1.0 - std::exp(-3.0), 1e-12);
}

TEST(Quadrature, DepthExhaustionIsAConvergenceError) {
  // A jump can never meet an absolute tolerance of 1e-12 within depth 5.
  const auto step = [](double x) { return x < 0.3 ? 0.0 : 1.0; };
  const auto r = quad::adaptive_simpson(step, 0.0, 1.0, {1e-12, 5});
  EXPECT_FALSE(r.converged);
  EXPECT_THROW(quad::integrate(step, 0.0, 1.0, {1e-12, 5}), ConvergenceError);
}

TEST(Quadrature, EmptyIntervalIsZero) {
  EXPECT_EQ(quad::integrate([](double) { return 1.0; }, 2.0, 2.0), 0.0);
}

TEST(Quadrature, CompositeSimpson) {
  EXPECT_NEAR(quad::composite_simpson([](double x) { return x * x; }, 0.0, 3.0, 2), 9.0, 1e-14);
  EXPECT_NEAR(quad::composite_simpson([](double x) { return std::cos(x); }, 0.0, 1.0, 1024), std::sin(1.0), 1e-14);
  EXPECT_THROW(quad::composite_simpson([](double x) { return x; }, 0.0, 1.0, 3), DomainError);
}

TEST(Quadrature, TrapezoidIsExactForLines) {
  const std::vector<double> xs{0.0, 0.5, 2.0, 3.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(2.0 * x + 1.0);
  EXPECT_DOUBLE_EQ(quad::trapezoid(xs, ys), 12.0);
  EXPECT_THROW(quad::trapezoid(xs, std::vector<double>{1.0}), DomainError);
}

TEST(Quadrature, GaussLegendre8IsExactToDegree15) {
  const auto f = [](double x) { return std::pow(x, 15) + std::pow(x, 14) - 2.0 * x; };
  const double exact = (1.0 / 16.0) * (std::pow(2.0, 16) - 1.0) + (1.0 / 15.0) * (std::pow(2.0, 15) + 1.0) - (4.0 - 1.0);
  EXPECT_NEAR(quad::gauss_legendre8(f, -1.0, 2.0), exact, 1e-9 * std::abs(exact));
  double wsum = 0.0;
  for (double w : quad::kGL8Weights) wsum += w;
  EXPECT_NEAR(wsum, 2.0, 1e-15);
}
