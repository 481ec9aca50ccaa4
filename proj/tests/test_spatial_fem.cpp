#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracadapt/spatial_fem.hpp"

using namespace fracadapt;

TEST(SpatialFem, Sizes) {
  const SpatialDiscretization d(1.0, 10);
  EXPECT_EQ(d.dofs(), 19);
  EXPECT_NEAR(d.coordinates()[0], 0.05, 1e-15);
  EXPECT_NEAR(d.coordinates()[18], 0.95, 1e-15);
  EXPECT_THROW(SpatialDiscretization(1.0, 1), DomainError);
  EXPECT_THROW(SpatialDiscretization(0.0, 4), DomainError);
}

TEST(SpatialFem, MatricesSymmetricPositive) {
  const SpatialDiscretization d(2.0, 6);
  EXPECT_LT((d.mass() - d.mass().transpose()).norm(), 1e-15);
  EXPECT_LT((d.stiffness() - d.stiffness().transpose()).norm(), 1e-13);
  EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(d.stiffness()).info(), Eigen::Success);
}

TEST(SpatialFem, QuadraticIsExact) {
  // v = x(1-x): ||v||_2 = sqrt(1/30), a(v,v) = 1/3, -v'' = 2
  const SpatialDiscretization d(1.0, 10);
  const SpatialVector v = d.interpolate([](double x) { return x * (1 - x); });
  EXPECT_NEAR(l2_norm(v, d), 0.18257418583505537115, 1e-15);
  EXPECT_NEAR(v.dot(d.stiffness() * v), 1.0 / 3.0, 1e-14);
  const SpatialVector Av = d.stiffness() * v;
  const SpatialVector b = d.load([](double) { return 2.0; });
  EXPECT_LT((Av - b).lpNorm<Eigen::Infinity>(), 1e-14);
  EXPECT_NEAR(linf_norm(v, d), 0.25, 1e-15);
  EXPECT_NEAR(d.evaluate(v, 0.3), 0.21, 1e-15);
}

TEST(SpatialFem, ProjectionReproducesDiscreteFunctions) {
  const SpatialDiscretization d(1.0, 7);
  const SpatialVector v = d.interpolate([](double x) { return x * (1 - x) * (0.3 + x); });
  const SpatialVector p = d.project([&](double x) { return d.evaluate(v, x); });
  EXPECT_LT((p - v).lpNorm<Eigen::Infinity>(), 1e-13);
}

TEST(SpatialFem, SmallestEigenvalueAbovePiSquared) {
  const SpatialDiscretization d(1.0, 10);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(d.stiffness(), d.mass());
  const double lmin = es.eigenvalues().minCoeff();
  EXPECT_GE(lmin, std::numbers::pi * std::numbers::pi);
  EXPECT_NEAR(lmin, std::numbers::pi * std::numbers::pi, 5e-4);
}

TEST(SpatialFem, NormsAgreeWithSpatialNorm) {
  const SpatialDiscretization d(1.0, 5);
  const SpatialVector v = d.interpolate([](double x) { return std::sin(3 * x); });
  EXPECT_DOUBLE_EQ(spatial_norm(v, d, NormKind::L2), l2_norm(v, d));
  EXPECT_DOUBLE_EQ(spatial_norm(v, d, NormKind::Linf), linf_norm(v, d));
  EXPECT_THROW(l2_norm(SpatialVector::Zero(3), d), PreconditionError);
}
