#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fracadapt/temporal_mesh.hpp"

using namespace fracadapt;

TEST(TemporalMesh, BasicAccessors) {
  TemporalMesh m({0.0, 0.25, 0.5, 1.0});
  EXPECT_EQ(m.intervals(), 3u);
  EXPECT_DOUBLE_EQ(m.step(3), 0.5);
  EXPECT_DOUBLE_EQ(m.final_time(), 1.0);
  EXPECT_EQ(m.locate(0.0), 0u);
  EXPECT_EQ(m.locate(0.25), 1u);
  EXPECT_EQ(m.locate(0.3), 2u);
  EXPECT_EQ(m.locate(1.0), 3u);
  EXPECT_THROW(m.locate(1.5), DomainError);
}

TEST(TemporalMesh, Validation) {
  EXPECT_THROW(TemporalMesh({0.1, 0.2}), PreconditionError);
  EXPECT_THROW(TemporalMesh({0.0, 0.2, 0.2}), PreconditionError);
  TemporalMesh m;
  m.push_back(0.5);
  EXPECT_THROW(m.push_back(0.5), PreconditionError);
}

TEST(SamplingGrid, GradedPoints) {
  const SamplingGrid g = sampling_points(0.4);
  ASSERT_EQ(g.points.size(), 19u);
  EXPECT_NEAR(g.p, 1.0 / 0.6, 1e-15);
  EXPECT_NEAR(g.points[0], 0.0067860440414872664288, 1e-17);
  for (std::size_t i = 1; i < g.points.size(); ++i) EXPECT_GT(g.points[i], g.points[i - 1]);
  EXPECT_LT(g.points.back(), 1.0);
}

TEST(SamplingGrid, ExponentCappedAtFive) {
  EXPECT_DOUBLE_EQ(sampling_points(0.99).p, 5.0);
  EXPECT_DOUBLE_EQ(sampling_points(0.8).p, 5.0);
  EXPECT_NEAR(sampling_points(0.1).p, 1.0 / 0.9, 1e-15);
  EXPECT_THROW(sampling_points(1.0), DomainError);
}

TEST(GradedMesh, NodesAndUniform) {
  const TemporalMesh g = graded_mesh(4, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(g.node(1), 1.0 / 16);
  EXPECT_DOUBLE_EQ(g.node(4), 1.0);
  const TemporalMesh u = uniform_mesh(8, 2.0);
  EXPECT_DOUBLE_EQ(u.step(5), 0.25);
}

TEST(GradedMesh, CsvRoundTrip) {
  const TemporalMesh g = graded_mesh(7, 3.3, 1.0);
  std::stringstream ss;
  write_mesh_csv(ss, g);
  const TemporalMesh r = read_mesh_csv(ss);
  ASSERT_EQ(r.intervals(), g.intervals());
  for (std::size_t k = 0; k <= g.intervals(); ++k) EXPECT_EQ(r.node(k), g.node(k));
}
