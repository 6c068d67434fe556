#include "grefine/graph.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"

namespace grefine {
namespace {

TEST(GraphTest, RingMembership) {
  const Graph c6 = ring_graph(6);
  EXPECT_EQ(c6.edge_count(), 6u);
  EXPECT_TRUE(c6.has_edge(0, 1));
  EXPECT_TRUE(c6.has_edge(1, 0));
  EXPECT_TRUE(c6.has_edge(5, 0));
  EXPECT_FALSE(c6.has_edge(0, 3));
  EXPECT_FALSE(c6.has_edge(2, 2));
}

TEST(GraphTest, OutOfRangeQueriesThrow) {
  const Graph c6 = ring_graph(6);
  EXPECT_THROW(c6.has_edge(0, 6), std::out_of_range);
  Graph g = c6;
  EXPECT_THROW(g.add_edge(7, 1), std::out_of_range);
  EXPECT_THROW(g.remove_edge(1, 9), std::out_of_range);
}

TEST(GraphTest, SelfLoopAddRejectedRemoveIsNoOp) {
  Graph g = ring_graph(6);
  EXPECT_THROW(g.add_edge(3, 3), std::invalid_argument);
  g.remove_edge(3, 3);
  EXPECT_EQ(g, ring_graph(6));
}

TEST(GraphTest, AddIsIdempotentAndRemoveOfMissingIsNoOp) {
  Graph g = ring_graph(6);
  g.add_edge(0, 3);
  EXPECT_EQ(g.edge_count(), 7u);
  g.add_edge(0, 1);
  g.add_edge(3, 0);
  EXPECT_EQ(g.edge_count(), 7u);
  g.remove_edge(1, 4);
  EXPECT_EQ(g.edge_count(), 7u);
}

TEST(GraphTest, RemoveThenAddRestores) {
  Graph g = ring_graph(6);
  g.remove_edge(0, 1);
  EXPECT_EQ(g.edge_count(), 5u);
  g.add_edge(0, 1);
  EXPECT_EQ(g, ring_graph(6));
}

TEST(GraphTest, Degrees) {
  EXPECT_EQ(ring_graph(6).degrees(), (std::vector<std::size_t>(6, 2)));
  EXPECT_EQ(Graph(4).degrees(), (std::vector<std::size_t>(4, 0)));

  const Graph traced(6, {{1, 2}, {2, 3}, {0, 3}, {1, 4}, {2, 4}, {5, 3}, {1, 3}, {0, 4}});
  const auto d = traced.degrees();
  EXPECT_EQ(std::accumulate(d.begin(), d.end(), std::size_t{0}), 16u);
}

TEST(GraphTest, EdgesAreCanonical) {
  const Graph g(4, {{3, 1}, {2, 0}, {1, 0}});
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {0, 2}, {1, 3}}));
}

// Random add/remove sequences keep the handshake identity and inverse pairs
// restore the edge set.
TEST(GraphTest, RandomEditInvariants) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    Graph g = oracle::random_graph(n, 0.3, rng);
    std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
    for (int step = 0; step < 50; ++step) {
      NodeId u = node(rng), v = node(rng);
      if (u == v) continue;
      const Graph before = g;
      if (g.has_edge(u, v)) {
        g.remove_edge(u, v);
        g.add_edge(u, v);
      } else {
        g.add_edge(u, v);
        g.remove_edge(u, v);
      }
      ASSERT_EQ(g, before);
      g.toggle_edge(u, v);
      const auto d = g.degrees();
      ASSERT_EQ(std::accumulate(d.begin(), d.end(), std::size_t{0}), 2 * g.edge_count());
      ASSERT_EQ(g.edges().size(), g.edge_count());
    }
  }
}

TEST(GraphTest, NeighbourListsMatchMatrix) {
  std::mt19937_64 rng(11);
  Graph g = oracle::random_graph(15, 0.4, rng);
  for (int i = 0; i < 100; ++i) g.toggle_edge(static_cast<NodeId>(rng() % 7), static_cast<NodeId>(7 + rng() % 8));
  for (NodeId v = 0; v < 15; ++v) {
    std::size_t count = 0;
    for (NodeId u = 0; u < 15; ++u) count += g.has_edge(u, v);
    EXPECT_EQ(g.degree(v), count);
    for (NodeId u : g.neighbours(v)) EXPECT_TRUE(g.has_edge(u, v));
  }
}

TEST(GraphTest, ClassLabelCarriedButStructureComparable) {
  Graph a(3, {{0, 1}}, 1);
  Graph b(3, {{0, 1}}, 0);
  EXPECT_FALSE(a == b);
  EXPECT_TRUE(a.same_structure(b));
}

}  // namespace
}  // namespace grefine
