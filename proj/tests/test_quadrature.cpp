#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include "fracadapt/quadrature.hpp"

using namespace fracadapt;

TEST(Quadrature, PolynomialExactOnOnePanel) {
  auto f = [](double x) { return 3 * x * x - 2 * x + 1; };
  double err = 1.0;
  EXPECT_NEAR(integrate_scalar(f, 0.0, 2.0, {}, {}, &err), 8.0 - 4.0 + 2.0, 1e-14);
  EXPECT_LT(err, 1e-13);
}

TEST(Quadrature, SmoothIntegrands) {
  EXPECT_NEAR(integrate_scalar([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), 2.0, 1e-14);
  EXPECT_NEAR(integrate_scalar([](double x) { return std::exp(-x * x); }, -5.0, 5.0),
              std::sqrt(std::numbers::pi) * std::erf(5.0), 1e-14);
}

TEST(Quadrature, WeaklySingularKernel) {
  // int_0^1 (1-x)(1-0.9x)^{-0.4} dx
  std::array<double, 3> way = {0.5, 0.9, 0.99};
  QuadratureOptions o;
  o.rel_tol = 1e-12;
  const double v = integrate_scalar([](double x) { return (1 - x) * std::exp(-0.4 * std::log1p(-0.9 * x)); }, 0.0,
                                    1.0, way, o);
  EXPECT_NEAR(v, 0.59814668764801414752, 1e-12);
}

TEST(Quadrature, EndpointSingularity) {
  // int_0^1 x^{-1/2} dx = 2
  QuadratureOptions o;
  o.rel_tol = 1e-10;
  const double v = integrate_scalar([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {}, o);
  EXPECT_NEAR(v, 2.0, 1e-9);
}

TEST(Quadrature, VectorComponentsShareTree) {
  auto f = [](double x, std::span<double> out) {
    out[0] = 1.0;
    out[1] = x;
    out[2] = 1e-8 * std::cos(x);
  };
  const QuadratureResult r = integrate_adaptive(f, 3, 0.0, 1.0);
  EXPECT_NEAR(r.value[0], 1.0, 1e-15);
  EXPECT_NEAR(r.value[1], 0.5, 1e-15);
  EXPECT_NEAR(r.value[2], 1e-8 * std::sin(1.0), 1e-22);
  EXPECT_EQ(r.evaluations % 15, 0u);
}

TEST(Quadrature, NonFiniteIntegrandReported) {
  auto f = [](double x) { return x > 0.3 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
  EXPECT_THROW(integrate_scalar(f, 0.0, 1.0), EvaluationError);
}

TEST(Quadrature, PanelLimitReported) {
  QuadratureOptions o;
  o.max_panels = 8;
  o.rel_tol = 1e-15;
  auto f = [](double x) { return std::sin(1.0 / (x + 1e-3)); };
  try {
    integrate_scalar(f, 0.0, 1.0, {}, o);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.best_estimate().size(), 1u);
    EXPECT_EQ(e.error_estimate().size(), 1u);
  }
}

TEST(Quadrature, ArgumentChecks) {
  auto f = [](double) { return 1.0; };
  EXPECT_THROW(integrate_scalar(f, 1.0, 0.0), DomainError);
  std::array<double, 1> bad = {2.0};
  EXPECT_THROW(integrate_scalar(f, 0.0, 1.0, bad), DomainError);
}

TEST(Quadrature, RoundoffLimitedFlag) {
  // oscillating integrand of tiny total: error estimates hit the noise floor
  auto f = [](double x, std::span<double> out) { out[0] = std::sin(200.0 * std::numbers::pi * x); };
  QuadratureOptions o;
  o.rel_tol = 1e-15;
  o.max_panels = 100000;
  const QuadratureResult r = integrate_adaptive(f, 1, 0.0, 1.0, {}, o);
  EXPECT_NEAR(r.value[0], 0.0, 1e-12);
  EXPECT_TRUE(r.roundoff_limited);
}
