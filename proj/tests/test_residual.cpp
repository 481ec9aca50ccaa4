#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "fracadapt/builtin_problems.hpp"
#include "fracadapt/residual.hpp"

using namespace fracadapt;

namespace {

TimeSolution march(const TimeStepper& st, const std::vector<double>& nodes) {
  TimeSolution sol = st.start();
  for (std::size_t k = 1; k < nodes.size(); ++k) st.advance(sol, nodes[k]);
  return sol;
}

}  // namespace

TEST(Barrier, R0Formula) {
  BarrierSpec b;
  b.lambda = 2.0;
  const double a = 0.3;
  EXPECT_NEAR(barrier(b, a, 0.5), std::pow(0.5, -a) / std::tgamma(1 - a) + 2.0, 1e-14);
  b.omega = 1.0;
  b.TOL = 1e-3;
  EXPECT_NEAR(barrier_threshold(b, a, 0.5), 0.5e-3 * barrier(b, a, 0.5), 1e-18);
  EXPECT_THROW(barrier(b, a, 0.0), DomainError);
}

TEST(Barrier, R1ContinuousAtProfile) {
  BarrierSpec b;
  b.kind = BarrierKind::R1;
  b.lambda = std::numbers::pi * std::numbers::pi;
  b.tau_prof = 0.01;
  for (double a : {0.1, 0.4, 0.99}) {
    const double at = barrier(b, a, b.tau_prof);
    // t < tau_prof: rho(s) = s^{-beta} is smooth in s
    const double lo = barrier(b, a, b.tau_prof * (1 - 1e-15));
    EXPECT_LE(std::abs(lo - at), 1e-12 * at) << a;
    // t > tau_prof: 1 - (1-s)^beta is only Hoelder-beta at s = 1
    const double beta = 1 - a;
    for (double eps : {1e-4, 1e-8, 1e-12}) {
      const double hi = barrier(b, a, b.tau_prof / (1 - eps));
      EXPECT_LE(std::abs(hi - at), 2.0 * std::pow(eps, beta) * at) << a << ' ' << eps;
    }
    // the two branches of rho meet at s = 1
    EXPECT_LE(std::abs(-std::expm1(beta * std::log1p(-1.0)) - barrier_rho(1.0, beta)), 1e-12);
  }
}

TEST(Barrier, R1Regimes) {
  BarrierSpec b;
  b.kind = BarrierKind::R1;
  b.lambda = 0.0;
  b.tau_prof = 0.1;
  const double a = 0.4, ig = 1 / std::tgamma(1 - a);
  // t <= tau_prof: rho = s^{-beta}, barrier = t^{-1} (t/tau)^{1-a} / Gamma(1-a)
  EXPECT_NEAR(barrier(b, a, 0.05), ig * std::pow(0.5, 0.6) / 0.05, 1e-12);
  // small s = tau_prof / t: rho ~ beta s^{1-beta}
  const double t = 1e6 * b.tau_prof;
  EXPECT_NEAR(barrier(b, a, t) * t / ig, 0.6 * std::pow(1e-6, 0.4), 1e-9);
  BarrierSpec bad = b;
  bad.tau_prof = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(barrier(bad, a, 0.5), DomainError);
}

TEST(Barrier, RhoStableForSmallArgument) {
  // rho(s) = s^{-beta}(1 - (1-s)^beta) ~ beta s^{1-beta}
  const double s = 1e-12, beta = 0.5;
  EXPECT_NEAR(barrier_rho(s, beta) / std::pow(s, 1 - beta), beta, 1e-10);
}

TEST(Barrier, Validation) {
  BarrierSpec b;
  b.omega = 1.0;
  b.norm = NormKind::L2;
  EXPECT_THROW(b.validate(), DomainError);
  b.norm = NormKind::Linf;
  b.TOL = 0.0;
  EXPECT_THROW(b.validate(), DomainError);
}

TEST(Residual, VanishesAtEnforcementPoints) {
  const ProblemSpec p = builtin_example1(0.4);
  const SpatialDiscretization sp(1.0, 10);
  const std::vector<double> grid = sampling_points(0.4).points;
  for (MethodSpec ms : {MethodSpec::l1(), MethodSpec::l12(), MethodSpec::coll(2), MethodSpec::coll(4),
                        MethodSpec::coll(8)}) {
    const TimeStepper st(p, sp, ms);
    const ResidualEngine eng(st);
    const TimeSolution sol = march(st, graded_mesh(10, 2.0, 1.0).nodes());
    for (std::size_t k = 1; k <= sol.intervals(); ++k) {
      const Eigen::MatrixXd Rs = eng.residual_vectors(sol, k, grid);
      double peak = 0.0;
      for (Eigen::Index c = 0; c < Rs.cols(); ++c) peak = std::max(peak, linf_norm(Rs.col(c), sp));
      const Eigen::MatrixXd Re = eng.residual_vectors(sol, k, st.enforcement_points());
      // roundoff floor: the residual is a difference of O(|f|) terms
      const double floor = 1e-13 * st.projected_f(sol.node(k)).lpNorm<Eigen::Infinity>();
      for (Eigen::Index c = 0; c < Re.cols(); ++c) {
        EXPECT_LE(linf_norm(Re.col(c), sp), std::max(1e-9 * peak, floor)) << ms.name() << " k=" << k;
      }
    }
  }
}

TEST(Residual, MatchesDirectDefinitionInsideInterval) {
  // G - I[G] + R0 L0 equals D u_h + M^{-1}(A u_h - b)
  const ProblemSpec p = builtin_example1(0.6);
  const SpatialDiscretization sp(1.0, 6);
  for (MethodSpec ms : {MethodSpec::l1(), MethodSpec::l12(), MethodSpec::coll(3)}) {
    const TimeStepper st(p, sp, ms);
    const ResidualEngine eng(st);
    const TimeSolution sol = march(st, graded_mesh(6, 2.0, 1.0).nodes());
    const std::vector<double> s = {0.13, 0.5, 0.91};
    for (std::size_t k = 1; k <= sol.intervals(); ++k) {
      const Eigen::MatrixXd R = eng.residual_vectors(sol, k, s);
      const Eigen::MatrixXd D = st.caputo().at_local(sol, k, s);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double t = sol.node(k - 1) + s[i] * sol.step(k);
        const SpatialVector u = sol.value_local(k, s[i]);
        const SpatialVector direct = D.col(static_cast<Eigen::Index>(i)) +
                                     sp.mass_factor().solve(sp.stiffness() * u - st.load(t));
        EXPECT_LE((R.col(static_cast<Eigen::Index>(i)) - direct).lpNorm<Eigen::Infinity>(), 1e-9)
            << ms.name() << " k=" << k;
      }
    }
  }
}

TEST(Residual, LimitAtZeroIsInitialDefect) {
  // R(0+) = L u0 - f(0) = -Gamma(1+alpha) x(1-x), L2 norm Gamma(1+alpha) sqrt(1/30)
  const double a = 0.4;
  const ProblemSpec p = builtin_example1(a);
  const SpatialDiscretization sp(1.0, 10);
  const TimeStepper st(p, sp, MethodSpec::coll(2));
  const ResidualEngine eng(st);
  TimeSolution sol = st.start();
  st.advance(sol, 0.01);
  const std::vector<double> s = {1e-14};
  const double r = l2_norm(eng.residual_vectors(sol, 1, s).col(0), sp);
  EXPECT_NEAR(r, std::tgamma(1 + a) * 0.18257418583505537115, 1e-5);
}

TEST(Residual, SampleAndCsv) {
  const ProblemSpec p = builtin_example1(0.4);
  const SpatialDiscretization sp(1.0, 10);
  const TimeStepper st(p, sp, MethodSpec::l1());
  const ResidualEngine eng(st);
  TimeSolution sol = st.start();
  st.advance(sol, 0.5);
  BarrierSpec b;
  b.TOL = 1e10;
  const auto out = eng.sample(sol, 1, {0.25, 0.75}, b);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NEAR(out[0].t, 0.125, 1e-15);
  EXPECT_TRUE(out[0].pass);
  std::ostringstream os;
  write_residual_csv(os, out);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,norm,threshold,pass");
}
