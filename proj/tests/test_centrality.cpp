#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "aef/centrality.hpp"
#include "oracles.hpp"

namespace {

using aef::NodeId;
using oracle::Matrix;

Matrix unit_complete(std::size_t n) {
  Matrix m(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 0.0;
  return m;
}

Matrix star(std::size_t leaves, double w = 1.0) {
  Matrix m(leaves + 1, std::vector<double>(leaves + 1, 0.0));
  for (std::size_t i = 1; i <= leaves; ++i) m[0][i] = m[i][0] = w;
  return m;
}

// Max-normalised Perron vector from a dense symmetric eigensolve.
std::vector<double> dense_perron(const Matrix& m, bool weighted) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m[i][j] > 0 ? (weighted ? m[i][j] : 1.0) : 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd v = es.eigenvectors().col(n - 1).cwiseAbs();
  v /= v.maxCoeff();
  return {v.data(), v.data() + n};
}

TEST(Degree, UnitAndWeighted) {
  auto k4 = aef::degree_centralities(oracle::from_dense(unit_complete(4)));
  EXPECT_EQ(k4.degree[0], 3u);
  EXPECT_EQ(k4.weighted[0], 3.0);
  auto s = aef::degree_centralities(oracle::from_dense(star(3, 2.0)));
  EXPECT_EQ(s.degree[0], 3u);
  EXPECT_EQ(s.weighted[0], 6.0);
}

TEST(Eigenvector, SymmetricAndPathClosedForms) {
  for (double x : aef::eigenvector_centrality(oracle::from_dense(unit_complete(4)))) EXPECT_NEAR(x, 1.0, 1e-9);
  auto p = aef::eigenvector_centrality(oracle::from_dense({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
  EXPECT_NEAR(p[1], 1.0, 1e-9);
  EXPECT_NEAR(p[0], 1.0 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(p[2], 1.0 / std::sqrt(2.0), 1e-9);
}

TEST(Eigenvector, MatchesDenseEigensolveAndSatisfiesEigenEquation) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = oracle::random_connected(12, 0.25, 10, rng);
    const auto g = oracle::from_dense(m);
    for (bool weighted : {false, true}) {
      auto v = aef::eigenvector_centrality(g, {.weighted = weighted});
      auto ref = dense_perron(m, weighted);
      for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], ref[i], 1e-7);
      // A v = lambda v in max norm.
      std::vector<double> av(v.size(), 0.0);
      for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) av[i] += (m[i][j] > 0 ? (weighted ? m[i][j] : 1.0) : 0.0) * v[j];
      const double lambda = *std::max_element(av.begin(), av.end());
      for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(av[i], lambda * v[i], 1e-8 * lambda);
    }
  }
}

TEST(Eigenvector, ArgmaxInvariantUnderWeightScaling) {
  std::mt19937_64 rng(4);
  const auto g = oracle::from_dense(oracle::random_connected(15, 0.2, 10, rng));
  auto a = aef::eigenvector_centrality(g, {.weighted = true});
  auto b = aef::eigenvector_centrality(g.scaled(123.0), {.weighted = true});
  EXPECT_EQ(std::max_element(a.begin(), a.end()) - a.begin(), std::max_element(b.begin(), b.end()) - b.begin());
}

TEST(Eigenvector, NodesOutsideLargestComponentScoreZero) {
  Matrix m(6, std::vector<double>(6, 0.0));
  auto link = [&](int a, int b) { m[a][b] = m[b][a] = 1; };
  link(0, 1);
  link(1, 2);
  link(2, 3);
  link(4, 5);
  auto v = aef::eigenvector_centrality(oracle::from_dense(m));
  EXPECT_EQ(v[4], 0.0);
  EXPECT_EQ(v[5], 0.0);
  EXPECT_NEAR(*std::max_element(v.begin(), v.end()), 1.0, 1e-12);
}

TEST(Eigenvector, ReportsNonConvergence) {
  std::mt19937_64 rng(1);
  auto g = oracle::from_dense(oracle::random_connected(10, 0.3, 10, rng));
  EXPECT_THROW(aef::eigenvector_centrality(g, {.weighted = false, .tolerance = 1e-300, .max_iterations = 3}),
               aef::ConvergenceError);
}

TEST(Betweenness, StarAndComplete) {
  // Five nodes: centre plus four leaves; C(4, 2) = 6 leaf pairs route via the centre.
  auto s = aef::betweenness_centrality(oracle::from_dense(star(4)), false);
  EXPECT_DOUBLE_EQ(s[0], 6.0);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_EQ(s[i], 0.0);
  for (double x : aef::betweenness_centrality(oracle::from_dense(unit_complete(4)), false)) EXPECT_EQ(x, 0.0);
  for (double x : aef::betweenness_centrality(oracle::from_dense(unit_complete(4)), true)) EXPECT_EQ(x, 0.0);
}

TEST(Betweenness, WeightedUsesInverseWeightAsLength) {
  // 0-1 heavy, 1-2 heavy, 0-2 light: the two-hop route is shorter.
  Matrix m{{0, 10, 1}, {10, 0, 10}, {1, 10, 0}};
  auto g = oracle::from_dense(m);
  EXPECT_DOUBLE_EQ(aef::betweenness_centrality(g, true)[1], 1.0);
  EXPECT_DOUBLE_EQ(aef::betweenness_centrality(g, false)[1], 0.0);
}

TEST(Betweenness, MatchesPathEnumerationOracle) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t n = 3 + trial % 6;
    const auto m = oracle::random_connected(n, 0.35, 10, rng);
    const auto g = oracle::from_dense(m);
    for (bool weighted : {false, true}) {
      auto got = aef::betweenness_centrality(g, weighted, 1 + trial % 3);
      auto want = oracle::betweenness(m, weighted);
      for (std::size_t v = 0; v < n; ++v) EXPECT_NEAR(got[v], want[v], 1e-9) << "trial " << trial << " node " << v;
    }
  }
}

TEST(Betweenness, TiedWeightedPathsAreSplit) {
  // Square 0-1-3 and 0-2-3 with equal weights: each middle node carries half.
  Matrix m(4, std::vector<double>(4, 0.0));
  auto link = [&](int a, int b, double w) { m[a][b] = m[b][a] = w; };
  link(0, 1, 3);
  link(1, 3, 3);
  link(0, 2, 3);
  link(2, 3, 3);
  auto b = aef::betweenness_centrality(oracle::from_dense(m), true);
  EXPECT_DOUBLE_EQ(b[1], 0.5);
  EXPECT_DOUBLE_EQ(b[2], 0.5);
}

TEST(Clustering, ClosedForms) {
  for (bool w : {false, true}) {
    for (double x : aef::clustering_coefficient(oracle::from_dense(unit_complete(4)), w)) EXPECT_DOUBLE_EQ(x, 1.0);
    EXPECT_EQ(aef::clustering_coefficient(oracle::from_dense(star(3)), w)[0], 0.0);
  }
  // Triangle with weights {1, 1, 2}: every node's neighbourhood is closed.
  Matrix tri{{0, 2, 1}, {2, 0, 1}, {1, 1, 0}};
  auto g = oracle::from_dense(tri);
  EXPECT_DOUBLE_EQ(aef::clustering_coefficient(g, false)[2], 1.0);
  EXPECT_DOUBLE_EQ(aef::clustering_coefficient(g, true)[2], 1.0);
}

TEST(Clustering, WeightedHandComputation) {
  // Node 0 links to 1 (w 1), 2 (w 2), 3 (w 3); only 1-2 closes a triangle.
  // Unweighted 1/3. Weighted: (w01 + w02) / (s0 (k0 - 1)) = 3 / (6 * 2) = 0.25.
  Matrix m(4, std::vector<double>(4, 0.0));
  auto link = [&](int a, int b, double w) { m[a][b] = m[b][a] = w; };
  link(0, 1, 1);
  link(0, 2, 2);
  link(0, 3, 3);
  link(1, 2, 5);
  auto g = oracle::from_dense(m);
  EXPECT_DOUBLE_EQ(aef::clustering_coefficient(g, false)[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(aef::clustering_coefficient(g, true)[0], 0.25);
  EXPECT_EQ(aef::clustering_coefficient(g, true)[3], 0.0);
}

TEST(TCore, ClosedForms) {
  // Tree.
  Matrix tree(5, std::vector<double>(5, 0.0));
  for (int i = 1; i < 5; ++i) tree[i][(i - 1) / 2] = tree[(i - 1) / 2][i] = 1;
  for (auto c : aef::t_core(oracle::from_dense(tree))) EXPECT_EQ(c, 0u);
  for (auto c : aef::t_core(oracle::from_dense(unit_complete(4)))) EXPECT_EQ(c, 3u);
  for (auto c : aef::t_core(oracle::from_dense(unit_complete(5)))) EXPECT_EQ(c, 6u);
}

TEST(TCore, MatchesExhaustiveSubsetOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + trial % 7;
    const auto m = oracle::random_connected(n, 0.55, 3, rng);
    auto got = aef::t_core(oracle::from_dense(m));
    auto want = oracle::t_core(m);
    for (std::size_t v = 0; v < n; ++v) EXPECT_EQ(got[v], want[v]) << "trial " << trial << " node " << v;
  }
}

TEST(TCore, AddingAnEdgeNeverLowersCoreNumbers) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    auto m = oracle::random_connected(14, 0.3, 3, rng);
    auto before = aef::t_core(oracle::from_dense(m));
    std::vector<std::pair<std::size_t, std::size_t>> absent;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = i + 1; j < m.size(); ++j)
        if (m[i][j] == 0) absent.emplace_back(i, j);
    if (absent.empty()) continue;
    auto [a, b] = absent[std::uniform_int_distribution<std::size_t>(0, absent.size() - 1)(rng)];
    m[a][b] = m[b][a] = 1;
    auto after = aef::t_core(oracle::from_dense(m));
    for (std::size_t v = 0; v < m.size(); ++v) EXPECT_GE(after[v], before[v]);
  }
}

TEST(AllCentralities, DeterministicAndComplete) {
  std::mt19937_64 rng(31);
  const auto g = oracle::from_dense(oracle::random_connected(30, 0.1, 10, rng));
  auto a = aef::all_centralities(g, 1);
  auto b = aef::all_centralities(g, 3);
  EXPECT_EQ(a.betweenness, b.betweenness);
  EXPECT_EQ(a.weighted_betweenness, b.weighted_betweenness);
  EXPECT_EQ(a.t_core, b.t_core);
  EXPECT_EQ(a.weighted_eigenvector, b.weighted_eigenvector);
  EXPECT_EQ(a.clustering.size(), g.node_count());
}

}  // namespace
