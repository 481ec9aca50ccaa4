#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fracadapt/caputo.hpp"
#include "fracadapt/time_solution.hpp"
#include "caputo_oracle.hpp"

using namespace fracadapt;
using namespace fracadapt::testing;

namespace {

double max_rel_error(const SpatialVector& a, const SpatialVector& b) {
  const double scale = std::max(b.lpNorm<Eigen::Infinity>(), 1e-2);
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

void oracle_family(MethodSpec ms, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int inst = 0; inst < 50; ++inst) {
    const double alpha = 0.05 + 0.94 * u(rng);
    double T = 0.0;
    const TimeSolution sol = random_solution(rng, ms, &T);
    const CaputoEvaluator ev(alpha);
    const std::size_t K = sol.intervals();
    // a node, and a point inside a random interval
    std::uniform_int_distribution<std::size_t> pick(1, K);
    const std::size_t k = pick(rng);
    for (double t : {sol.node(k), sol.node(k - 1) + u(rng) * sol.step(k)}) {
      if (!(t > 0.0)) continue;
      const SpatialVector got = ev.eval(sol, t);
      const SpatialVector ref = brute_caputo(sol, t, alpha);
      const double abs_err = (got - ref).lpNorm<Eigen::Infinity>();
      EXPECT_TRUE(abs_err <= 1e-10 || abs_err <= 1e-8 * ref.lpNorm<Eigen::Infinity>())
          << ms.name() << " alpha=" << alpha << " K=" << K << " t=" << t << " err=" << abs_err
          << " ref=" << ref.lpNorm<Eigen::Infinity>();
    }
  }
}

}  // namespace

TEST(SingularIntegrals, ReferenceValue) {
  EXPECT_NEAR(i_sing(2, 4, 0.4, 0.7), 0.22641869503730290063, 1e-15);
}

TEST(SingularIntegrals, EndpointIntegralsSumToZeroDerivative) {
  // sum over l of psi^l with all coefficients 1 is the constant 1 -> zero derivative
  for (int m = 1; m <= 6; ++m) {
    double s0 = i_sing(0, m, 0.3, 0.8) + i_sing(m, m, 0.3, 0.8);
    EXPECT_NEAR(s0, 0.0, 1e-15);
  }
  EXPECT_THROW(i_sing(3, 2, 0.5, 0.5), DomainError);
  EXPECT_THROW(i_sing(1, 2, 0.5, 1.5), DomainError);
}

TEST(Caputo, PowerRuleLinear) {
  // u = t on one interval [0,2]
  const double alpha = 0.37;
  TimeSolution sol(MethodSpec::l1(), SpatialVector::Zero(1));
  IntervalBlock b;
  b.coeffs = {SpatialVector::Zero(1), SpatialVector::Constant(1, 2.0)};
  sol.append(2.0, b);
  const CaputoEvaluator ev(alpha);
  for (double t : {0.01, 0.5, 1.3, 2.0}) {
    EXPECT_NEAR(ev.eval(sol, t)[0], std::pow(t, 1 - alpha) / std::tgamma(2 - alpha), 1e-14);
  }
}

TEST(Caputo, PowerRuleQuadraticOverManyIntervals) {
  // u = t^2 represented exactly by Coll(2) on a graded mesh: U^0, U^2 nodal, U^1 = -tau^2
  const double alpha = 0.62;
  TimeSolution sol(MethodSpec::coll(2), SpatialVector::Zero(1));
  for (int k = 1; k <= 30; ++k) {
    const double a = std::pow((k - 1) / 30.0, 3.0), t = std::pow(k / 30.0, 3.0), tau = t - a;
    IntervalBlock b;
    b.coeffs = {SpatialVector::Constant(1, a * a), SpatialVector::Constant(1, -tau * tau),
                SpatialVector::Constant(1, t * t)};
    sol.append(t, b);
  }
  const CaputoEvaluator ev(alpha);
  for (double t : {1e-5, 0.004, 0.3, 0.77, 1.0}) {
    const double ref = 2 * std::pow(t, 2 - alpha) / std::tgamma(3 - alpha);
    EXPECT_NEAR(ev.eval(sol, t)[0], ref, 1e-13 * std::max(1.0, ref)) << t;
  }
}

TEST(Caputo, OracleReproducesPowerRule) {
  for (double alpha : {0.1, 0.5, 0.99}) {
    TimeSolution sol(MethodSpec::coll(2), SpatialVector::Zero(1));
    for (int k = 1; k <= 4; ++k) {
      const double a = (k - 1) / 4.0, t = k / 4.0, tau = t - a;
      IntervalBlock b;
      b.coeffs = {SpatialVector::Constant(1, a * a), SpatialVector::Constant(1, -tau * tau),
                  SpatialVector::Constant(1, t * t)};
      sol.append(t, b);
    }
    for (double t : {0.1, 0.5, 0.6, 1.0}) {
      const double ref = 2 * std::pow(t, 2 - alpha) / std::tgamma(3 - alpha);
      EXPECT_NEAR(brute_caputo(sol, t, alpha)[0], ref, 1e-13 * ref) << alpha << ' ' << t;
    }
  }
}

TEST(Caputo, ConstantHasZeroDerivative) {
  TimeSolution sol(MethodSpec::coll(3), SpatialVector::Constant(2, 4.0));
  for (int k = 1; k <= 5; ++k) {
    IntervalBlock b;
    b.coeffs = {SpatialVector::Constant(2, 4.0), SpatialVector::Zero(2), SpatialVector::Zero(2),
                SpatialVector::Constant(2, 4.0)};
    sol.append(0.2 * k, b);
  }
  const CaputoEvaluator ev(0.5);
  EXPECT_LT(ev.eval(sol, 0.73).lpNorm<Eigen::Infinity>(), 1e-15);
}

TEST(Caputo, SeriesAndQuadratureBranchesAgree) {
  const double alpha = 0.45;
  CaputoOptions all_quad;
  all_quad.series_radius = 0.0;
  const CaputoEvaluator fast(alpha), slow(alpha, all_quad);
  std::mt19937_64 rng(7);
  double T = 0.0;
  const TimeSolution sol = random_solution(rng, MethodSpec::coll(5), &T);
  const SpatialVector a = fast.eval(sol, T), b = slow.eval(sol, T);
  EXPECT_LT(max_rel_error(a, b), 1e-11);
  EXPECT_GT(slow.counters().quadrature_calls, 0u);
}

TEST(Caputo, EvalOutsideMeshRejected) {
  TimeSolution sol(MethodSpec::l1(), SpatialVector::Zero(1));
  IntervalBlock b;
  b.coeffs = {SpatialVector::Zero(1), SpatialVector::Ones(1)};
  sol.append(1.0, b);
  const CaputoEvaluator ev(0.5);
  EXPECT_THROW(ev.eval(sol, 0.0), DomainError);
  EXPECT_THROW(ev.eval(sol, 1.5), DomainError);
}

TEST(CaputoOracle, L1Family) { oracle_family(MethodSpec::l1(), 11); }
TEST(CaputoOracle, L12Family) { oracle_family(MethodSpec::l12(), 12); }
TEST(CaputoOracle, Coll2Family) { oracle_family(MethodSpec::coll(2), 13); }
TEST(CaputoOracle, Coll4Family) { oracle_family(MethodSpec::coll(4), 14); }
TEST(CaputoOracle, Coll8Family) { oracle_family(MethodSpec::coll(8), 15); }
TEST(CaputoOracle, Coll12Family) { oracle_family(MethodSpec::coll(12), 16); }
