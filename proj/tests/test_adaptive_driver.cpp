#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracadapt/adaptive_driver.hpp"
#include "fracadapt/builtin_problems.hpp"

using namespace fracadapt;

namespace {

BarrierSpec default_barrier(double TOL) {
  BarrierSpec b;
  b.lambda = std::numbers::pi * std::numbers::pi;
  b.omega = b.lambda / 8;
  b.TOL = TOL;
  return b;
}

}  // namespace

TEST(AdaptiveDriver, L1CoarseToleranceReference) {
  const AdaptResult r = adapt_solve(builtin_example1(0.4), MethodSpec::l1(), default_barrier(1e-2));
  EXPECT_EQ(r.report.status, "ok");
  EXPECT_NEAR(static_cast<double>(r.report.intervals()), 10.0, 3.0);
  EXPECT_LE(r.report.max_error, 1e-2);
  EXPECT_NEAR(r.report.max_error, 4.83e-3, 2 * 4.83e-3);
  EXPECT_TRUE(r.report.residuals_pass());
  EXPECT_DOUBLE_EQ(r.report.mesh.back(), 1.0);
  EXPECT_EQ(r.report.trials.size(), r.report.intervals());
}

TEST(AdaptiveDriver, MeshGradedTowardsOrigin) {
  const AdaptResult r = adapt_solve(builtin_example1(0.4), MethodSpec::coll(2), default_barrier(1e-4));
  ASSERT_EQ(r.report.status, "ok");
  const auto& m = r.report.mesh;
  EXPECT_LT(m[1] - m[0], 1e-3 * (m.back() - m[m.size() - 2]));
  EXPECT_LE(r.report.max_error, 1e-4);
}

TEST(AdaptiveDriver, ErrorBelowToleranceAcrossMethods) {
  for (MethodSpec ms : {MethodSpec::l1(), MethodSpec::l12(), MethodSpec::coll(2), MethodSpec::coll(4),
                        MethodSpec::coll(8)}) {
    for (double a : {0.1, 0.4, 0.8}) {
      BarrierSpec b;
      b.TOL = 1e-2;
      const AdaptResult r = adapt_solve(builtin_example1(a), ms, b);
      EXPECT_EQ(r.report.status, "ok") << ms.name() << ' ' << a;
      EXPECT_LE(r.report.max_error, 1e-2) << ms.name() << ' ' << a;
    }
  }
}

TEST(AdaptiveDriver, R1ProfileAtFinalTime) {
  BarrierSpec b = default_barrier(1e-3);
  b.kind = BarrierKind::R1;
  const AdaptResult r = adapt_solve(builtin_example1(0.4), MethodSpec::coll(2), b);
  ASSERT_EQ(r.report.status, "ok");
  EXPECT_DOUBLE_EQ(r.report.barrier.tau_prof, r.report.mesh[1]);
  for (const auto& e : r.report.errors) EXPECT_LE(e.error, b.TOL * std::pow(e.t, 0.4 - 1.0)) << e.t;
  EXPECT_LE(r.report.errors.back().error, b.TOL);
}

TEST(AdaptiveDriver, UnderflowIsPrecisionError) {
  BarrierSpec b;
  b.TOL = 1e-300;
  const AdaptResult r = adapt_solve(builtin_example1(0.4), MethodSpec::l1(), b);
  EXPECT_EQ(r.report.status, "precision_error");
  EXPECT_NE(r.report.message.find("not representable"), std::string::npos);
}

TEST(AdaptiveDriver, IntervalBudget) {
  AdaptiveConfig c;
  c.max_intervals = 3;
  BarrierSpec b;
  b.TOL = 1e-6;
  const AdaptResult r = adapt_solve(builtin_example1(0.4), MethodSpec::l1(), b, c);
  EXPECT_EQ(r.report.status, "adaptation_error");
  EXPECT_EQ(r.report.intervals(), 3u);
  EXPECT_FALSE(r.report.errors.empty());
}

TEST(AdaptiveDriver, NoExactSolutionMeansNoErrors) {
  BarrierSpec b = default_barrier(1e-2);
  const AdaptResult r = adapt_solve(builtin_example2(0.4, 0.0), MethodSpec::coll(2), b);
  EXPECT_EQ(r.report.status, "ok");
  EXPECT_TRUE(r.report.errors.empty());
  EXPECT_TRUE(std::isnan(r.report.max_error));
  EXPECT_GT(r.report.cost.inner_iterations, r.report.intervals());
}

TEST(AdaptiveDriver, ConfigValidation) {
  AdaptiveConfig c;
  c.Q1 = 6.0;
  EXPECT_THROW(adapt_solve(builtin_example1(0.4), MethodSpec::l1(), BarrierSpec{}, c), DomainError);
  c = AdaptiveConfig{};
  c.tau_init = 2.0;
  EXPECT_THROW(adapt_solve(builtin_example1(0.4), MethodSpec::l1(), BarrierSpec{}, c), DomainError);
}
