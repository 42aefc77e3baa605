#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rcdenoise/graph.hpp"

using namespace rcdenoise;

namespace {

EdgeMask mask_from(const Matrix& w) { return w.array() != 0.0; }

}  // namespace

TEST(Graph, TriangleHasUnitClustering) {
  EdgeMask m = EdgeMask::Constant(3, 3, false);
  m(0, 1) = m(1, 2) = m(2, 0) = true;
  for (double c : graph::clustering(m)) EXPECT_DOUBLE_EQ(c, 1.0);
}

TEST(Graph, PathMiddleHasZeroClustering) {
  EdgeMask m = EdgeMask::Constant(3, 3, false);
  m(1, 0) = m(2, 1) = true;
  const auto c = graph::clustering(m);
  EXPECT_EQ(c[1], 0.0);
  EXPECT_EQ(c[0], 0.0);
}

TEST(Graph, DegreeCountsBothDirections) {
  EdgeMask m = EdgeMask::Constant(3, 3, false);
  m(1, 0) = m(0, 1) = m(2, 0) = true;
  m(2, 2) = true;  // self-loop ignored
  const auto d = graph::degree(m);
  EXPECT_EQ(d, (std::vector<double>{3, 2, 1}));
}

TEST(Graph, StarPageRankMatchesPowerIteration) {
  Matrix w = Matrix::Zero(4, 4);
  for (Eigen::Index leaf = 1; leaf < 4; ++leaf) {
    w(0, leaf) = 1.0;
    w(leaf, 0) = 1.0;
  }
  const auto pr = graph::pagerank(w, 0.85);
  const auto ref = oracle::pagerank_power(w, 0.85);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(pr[i], ref[i], 1e-10);
  EXPECT_GT(pr[0], pr[1]);
}

TEST(Graph, RandomGraphsMatchOracles) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 3 + trial % 30;
    const double p = 0.05 + 0.04 * (trial % 10);
    Matrix w = Matrix::Zero(n, n);
    std::bernoulli_distribution edge(p);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j && edge(g)) w(i, j) = u(g);
    const auto pr = graph::pagerank(w, 0.85);
    const auto ref = oracle::pagerank_power(w, 0.85);
    EXPECT_NEAR(std::accumulate(pr.begin(), pr.end(), 0.0), 1.0, 1e-12);
    for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(pr[static_cast<std::size_t>(i)], ref[static_cast<std::size_t>(i)], 1e-10);
    const auto mask = mask_from(w);
    const auto c = graph::clustering(mask);
    EXPECT_EQ(c, oracle::clustering_triangles(mask));
    for (double x : c) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(Graph, MinMaxNormalize) {
  EXPECT_EQ(graph::min_max_normalize({2, 4, 3}), (std::vector<double>{0, 1, 0.5}));
  EXPECT_EQ(graph::min_max_normalize({5, 5}), (std::vector<double>{0, 0}));
}
