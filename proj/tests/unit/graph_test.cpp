// Copyright 2026 hyntp-lab contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "hyntp/error.hpp"
#include "hyntp/graph.hpp"
#include "hyntp/numerics.hpp"

namespace hyntp::graph {
namespace {

Digraph one_way_pair() { return Digraph::from_adjacency({{0, 1}, {0, 0}}); }
Digraph two_way_pair() { return Digraph::from_adjacency({{0, 1}, {1, 0}}); }

std::vector<Digraph> strongly_connected_examples() {
  return {two_way_pair(),
          testing::complete_graph(3),
          testing::complete_graph(6),
          testing::directed_cycle(3),
          testing::directed_cycle(4),
          testing::directed_cycle(7),
          testing::five_agent_graph(),
          testing::four_agent_ring()};
}

TEST(Digraph, RejectsInvalidAdjacency) {
  EXPECT_THROW(Digraph::from_adjacency({{1, 1}, {1, 0}}), ContractError);
  EXPECT_THROW(Digraph::from_adjacency({{0, 2}, {1, 0}}), ContractError);
  EXPECT_THROW(Digraph::from_adjacency({{0}}), ContractError);
  EXPECT_THROW(Digraph::from_adjacency(Matrix(2, 3)), DimensionError);
  EXPECT_THROW(Digraph::from_edges(3, {{0, 3}}), ContractError);
}

TEST(Digraph, NeighboursFollowRows) {
  const Digraph g = testing::five_agent_graph();
  EXPECT_EQ(g.neighbours(0), (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(g.in_degree(0), 3u);
  EXPECT_EQ(g.out_degree(3), 2u);
}

TEST(Laplacian, TwoNodePair) {
  EXPECT_EQ(max_abs(laplacian(two_way_pair()) - Matrix{{1, -1}, {-1, 1}}), 0.0);
}

TEST(Laplacian, FiveAgentDiagonalIsInDegree) {
  const Matrix l = laplacian(testing::five_agent_graph());
  const double expected[] = {3, 2, 2, 2, 3};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(l(i, i), expected[i]);
}

TEST(Laplacian, DirectedThreeCycle) {
  EXPECT_EQ(max_abs(laplacian(testing::directed_cycle(3)) - Matrix{{1, 0, -1}, {-1, 1, 0}, {0, -1, 1}}), 0.0);
}

TEST(Laplacian, RowSumsVanishExactly) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 9;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) a(i, k) = (i != k && gen() % 2) ? 1.0 : 0.0;
    const Vector ones(n, 1.0);
    for (double v : laplacian(Digraph::from_adjacency(a)) * ones) EXPECT_EQ(v, 0.0);
  }
}

TEST(StronglyConnected, Examples) {
  EXPECT_TRUE(is_strongly_connected(testing::directed_cycle(3)));
  EXPECT_FALSE(is_strongly_connected(one_way_pair()));
  EXPECT_TRUE(is_strongly_connected(testing::five_agent_graph()));
  EXPECT_FALSE(is_strongly_connected(Digraph::from_edges(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}})));
}

TEST(StronglyConnected, ZeroIsSimpleEigenvalue) {
  for (const Digraph& g : strongly_connected_examples()) {
    int zeros = 0;
    for (const auto& z : numerics::spectrum(laplacian(g))) zeros += std::abs(z) < 1e-8 ? 1 : 0;
    EXPECT_EQ(zeros, 1) << "n = " << g.size();
  }
}

TEST(Classify, Examples) {
  const Classification k3 = classify(testing::complete_graph(3));
  EXPECT_TRUE(k3.balanced);
  EXPECT_TRUE(k3.complete);
  EXPECT_EQ(k3.max_in_degree, 2u);
  EXPECT_EQ(k3.min_in_degree, 2u);
  const Classification c3 = classify(testing::directed_cycle(3));
  EXPECT_TRUE(c3.balanced);
  EXPECT_FALSE(c3.complete);
  EXPECT_FALSE(classify(one_way_pair()).balanced);
}

TEST(DisagreementTransform, CompleteGraphOnTwoNodes) {
  const DisagreementTransform tr = disagreement_transform(two_way_pair());
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(tr.T(0, 0), r, 1e-15);
  EXPECT_NEAR(tr.T(1, 0), r, 1e-15);
  EXPECT_NEAR(std::abs(tr.T(0, 1)), r, 1e-12);
  EXPECT_NEAR(tr.T(1, 1), -tr.T(0, 1), 1e-12);
  ASSERT_EQ(tr.Lbar.rows(), 1u);
  EXPECT_NEAR(tr.Lbar(0, 0), 2.0, 1e-12);
  EXPECT_TRUE(tr.spectrum_real);
}

TEST(DisagreementTransform, CompleteGraphOnThreeNodes) {
  const DisagreementTransform tr = disagreement_transform(testing::complete_graph(3));
  EXPECT_LT(max_abs(tr.Lbar - Matrix::identity(2) * 3.0), 1e-10);
}

TEST(DisagreementTransform, RepeatedEigenvalueOfRing) {
  const DisagreementTransform tr = disagreement_transform(testing::four_agent_ring());
  EXPECT_LT(max_abs(tr.Lbar - Matrix{{2, 0, 0}, {0, 2, 0}, {0, 0, 4}}), 1e-9);
}

TEST(DisagreementTransform, ComplexPairsBecomeRealBlocks) {
  const DisagreementTransform tr = disagreement_transform(testing::directed_cycle(3));
  EXPECT_FALSE(tr.spectrum_real);
  EXPECT_NEAR(tr.Lbar(0, 0), 1.5, 1e-10);
  EXPECT_NEAR(tr.Lbar(1, 1), 1.5, 1e-10);
  EXPECT_NEAR(std::abs(tr.Lbar(0, 1)), 0.8660254037844386, 1e-10);
  EXPECT_NEAR(tr.Lbar(1, 0), -tr.Lbar(0, 1), 1e-10);
}

TEST(DisagreementTransform, BlockStructureOnAllExamples) {
  for (const Digraph& g : strongly_connected_examples()) {
    const std::size_t n = g.size();
    const DisagreementTransform tr = disagreement_transform(g);
    EXPECT_LT(max_abs(tr.T * tr.T_inv - Matrix::identity(n)), 1e-9);
    const Matrix m = tr.T_inv * laplacian(g) * tr.T;
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_LT(std::abs(m(0, k)), 1e-8);
      EXPECT_LT(std::abs(m(k, 0)), 1e-8);
    }
    EXPECT_LT(max_abs(m.block(1, 1, n - 1, n - 1) - tr.Lbar), 1e-8);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(tr.T(i, 0), 1.0 / std::sqrt(double(n)), 1e-15);
  }
}

TEST(DisagreementTransform, Deterministic) {
  const DisagreementTransform a = disagreement_transform(testing::five_agent_graph());
  const DisagreementTransform b = disagreement_transform(testing::five_agent_graph());
  EXPECT_EQ(max_abs(a.T - b.T), 0.0);
  EXPECT_EQ(max_abs(a.Lbar - b.Lbar), 0.0);
}

TEST(DisagreementTransform, RequiresStrongConnectivity) {
  EXPECT_THROW(disagreement_transform(one_way_pair()), PreconditionError);
}

TEST(GammaMatrix, InverseRoundTrip) {
  for (const Digraph& g : strongly_connected_examples()) {
    const DisagreementTransform tr = disagreement_transform(g);
    const Matrix gm = gamma_matrix(tr);
    ASSERT_EQ(gm.rows(), 4 * g.size() + 1);
    EXPECT_LT(max_abs(gm * numerics::inverse(gm) - Matrix::identity(gm.rows())), 1e-9);
  }
}

}  // namespace
}  // namespace hyntp::graph
