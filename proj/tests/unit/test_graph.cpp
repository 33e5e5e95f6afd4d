#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "graphbandit/errors.hpp"
#include "graphbandit/graph.hpp"

namespace gb = graphbandit;
using gb::NominalGraph;
using gb::VertexSet;

// Expert indices below are 0-based: expert 1 in the usual 1-based notation is 0 here.

namespace {

NominalGraph star(std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t j = 1; j < k; ++j) edges.emplace_back(0, j);
  return NominalGraph::with_edges(k, edges);
}

NominalGraph random_graph(gb::Rng& rng, std::size_t k, double density) {
  std::vector<std::uint8_t> adj(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) adj[i * k + j] = (i == j) || rng.bernoulli(density);
  }
  return NominalGraph(k, adj);
}

bool mask_covers(const NominalGraph& g, unsigned mask) {
  for (std::size_t j = 0; j < g.num_experts(); ++j) {
    bool hit = false;
    for (std::size_t i = 0; i < g.num_experts(); ++i) hit = hit || (((mask >> i) & 1u) && g.has_edge(i, j));
    if (!hit) return false;
  }
  return true;
}

// Smallest dominating set by enumerating every subset.
std::size_t brute_min_dominating(const NominalGraph& g) {
  std::size_t best = g.num_experts();
  for (unsigned m = 1; m < (1u << g.num_experts()); ++m) {
    if (static_cast<std::size_t>(__builtin_popcount(m)) < best && mask_covers(g, m)) {
      best = static_cast<std::size_t>(__builtin_popcount(m));
    }
  }
  return best;
}

std::size_t brute_alpha(const NominalGraph& g) {
  const std::size_t k = g.num_experts();
  std::size_t best = 0;
  for (unsigned m = 1; m < (1u << k); ++m) {
    bool ok = true;
    for (std::size_t i = 0; i < k && ok; ++i) {
      for (std::size_t j = 0; j < k && ok; ++j) {
        if (i != j && ((m >> i) & 1u) && ((m >> j) & 1u) && g.has_edge(i, j)) ok = false;
      }
    }
    if (ok) best = std::max(best, static_cast<std::size_t>(__builtin_popcount(m)));
  }
  return best;
}

}  // namespace

TEST(VertexSet, SortsAndRejectsDuplicates) {
  VertexSet s{3, 1, 2};
  EXPECT_EQ(s.members(), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(0));
  EXPECT_THROW((VertexSet{1, 1}), gb::ArgumentError);
}

TEST(NominalGraph, RequiresSelfLoops) {
  std::vector<std::uint8_t> adj{1, 1, 1, 0};
  EXPECT_THROW(NominalGraph(2, adj), gb::ArgumentError);
  EXPECT_THROW(NominalGraph(0, {}), gb::ArgumentError);
  EXPECT_THROW(NominalGraph(2, {1, 1, 1}), gb::ArgumentError);
}

TEST(Neighbors, OutNeighborExamples) {
  EXPECT_EQ(gb::out_neighbors(NominalGraph::complete(3), 0), (VertexSet{0, 1, 2}));
  EXPECT_EQ(gb::out_neighbors(NominalGraph::bandit(4), 1), (VertexSet{1}));
  EXPECT_EQ(gb::out_neighbors(star(4), 2), (VertexSet{2}));
}

TEST(Neighbors, InNeighborExamples) {
  EXPECT_EQ(gb::in_neighbors(NominalGraph::complete(3), 1), (VertexSet{0, 1, 2}));
  EXPECT_EQ(gb::in_neighbors(star(4), 2), (VertexSet{0, 2}));
  EXPECT_EQ(gb::in_neighbors(NominalGraph::bandit(4), 3), (VertexSet{3}));
}

TEST(Neighbors, IndexOutOfRange) {
  EXPECT_THROW(gb::out_neighbors(NominalGraph::complete(3), 3), gb::ArgumentError);
  EXPECT_THROW(gb::in_neighbors(NominalGraph::complete(3), 7), gb::ArgumentError);
}

TEST(Neighbors, OutAndInAreTransposes) {
  gb::Rng rng(3);
  for (int n = 0; n < 200; ++n) {
    const auto g = random_graph(rng, 1 + rng.below(9), rng.uniform());
    for (std::size_t i = 0; i < g.num_experts(); ++i) {
      const auto out = gb::out_neighbors(g, i);
      EXPECT_TRUE(out.contains(i));
      for (std::size_t j = 0; j < g.num_experts(); ++j) {
        ASSERT_EQ(out.contains(j), gb::in_neighbors(g, j).contains(i));
      }
    }
  }
}

TEST(GreedyDominatingSet, Examples) {
  EXPECT_EQ(gb::greedy_dominating_set(NominalGraph::complete(5)), (VertexSet{0}));
  EXPECT_EQ(gb::greedy_dominating_set(NominalGraph::bandit(4)), (VertexSet{0, 1, 2, 3}));

  const std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {0, 2}, {3, 4}};
  const auto g = NominalGraph::with_edges(5, edges);
  const auto d = gb::greedy_dominating_set(g);
  EXPECT_EQ(d, (VertexSet{0, 3}));
  EXPECT_EQ(brute_min_dominating(g), 2u);
}

TEST(GreedyDominatingSet, CoversRandomGraphs) {
  gb::Rng rng(17);
  for (int n = 0; n < 300; ++n) {
    const auto g = random_graph(rng, 1 + rng.below(20), rng.uniform());
    ASSERT_TRUE(gb::is_dominating_set(g, gb::greedy_dominating_set(g)));
  }
}

TEST(GreedyDominatingSet, WithinLogFactorOfMinimum) {
  gb::Rng rng(19);
  for (int n = 0; n < 300; ++n) {
    const std::size_t k = 1 + rng.below(12);
    const auto g = random_graph(rng, k, rng.uniform());
    const double bound = static_cast<double>(brute_min_dominating(g)) * (1.0 + std::log(static_cast<double>(k)));
    ASSERT_LE(static_cast<double>(gb::greedy_dominating_set(g).size()), bound);
  }
}

TEST(GreedyDominatingSet, Deterministic) {
  gb::Rng rng(23);
  const auto g = random_graph(rng, 10, 0.3);
  EXPECT_EQ(gb::greedy_dominating_set(g), gb::greedy_dominating_set(g));
}

TEST(IsDominatingSet, RejectsPartialCover) {
  EXPECT_FALSE(gb::is_dominating_set(NominalGraph::bandit(3), VertexSet{0, 1}));
  EXPECT_TRUE(gb::is_dominating_set(star(4), VertexSet{0}));
}

TEST(IndependenceNumber, Examples) {
  EXPECT_EQ(gb::independence_number(NominalGraph::complete(6)), 1u);
  EXPECT_EQ(gb::independence_number(NominalGraph::bandit(7)), 7u);
  std::vector<std::pair<std::size_t, std::size_t>> cycle;
  for (std::size_t i = 0; i < 5; ++i) {
    cycle.emplace_back(i, (i + 1) % 5);
    cycle.emplace_back((i + 1) % 5, i);
  }
  const auto c5 = NominalGraph::with_edges(5, cycle);
  EXPECT_EQ(brute_alpha(c5), 2u);
  EXPECT_EQ(gb::independence_number(c5), 2u);
}

TEST(IndependenceNumber, CompleteAndBanditUpToTen) {
  for (std::size_t k = 1; k <= 10; ++k) {
    EXPECT_EQ(gb::independence_number(NominalGraph::complete(k)), 1u);
    EXPECT_EQ(gb::independence_number(NominalGraph::bandit(k)), k);
  }
}

TEST(IndependenceNumber, MatchesBruteForce) {
  gb::Rng rng(29);
  for (int n = 0; n < 200; ++n) {
    const auto g = random_graph(rng, 1 + rng.below(12), rng.uniform());
    ASSERT_EQ(gb::independence_number(g), brute_alpha(g));
  }
}

TEST(IndependenceNumber, RejectsLargeGraphs) {
  EXPECT_NO_THROW(gb::independence_number(NominalGraph::bandit(25)));
  EXPECT_THROW(gb::independence_number(NominalGraph::bandit(26)), gb::UnsupportedSize);
}

TEST(EdgeProbabilityTable, Validation) {
  const auto g = NominalGraph::complete(2);
  EXPECT_THROW(gb::EdgeProbabilityTable(g, {0.5, 0.1, 0.5, 0.5}, 0.2), gb::ArgumentError);
  EXPECT_THROW(gb::EdgeProbabilityTable(g, {0.5, 1.1, 0.5, 0.5}, 0.2), gb::ArgumentError);
  EXPECT_THROW(gb::EdgeProbabilityTable(g, {0.5, 0.5, 0.5, 0.5}, 0.0), gb::ArgumentError);
  // non-edges are stored as zero
  const auto b = NominalGraph::bandit(2);
  const gb::EdgeProbabilityTable p(b, {0.5, 0.9, 0.9, 0.5}, 0.5);
  EXPECT_EQ(p(0, 1), 0.0);
  EXPECT_EQ(p(1, 1), 0.5);
}

TEST(EdgeProbabilityTable, UniformWithinBounds) {
  gb::Rng rng(31);
  const auto g = NominalGraph::complete(6);
  const auto p = gb::EdgeProbabilityTable::uniform(g, 0.25, 0.5, rng);
  EXPECT_EQ(p.epsilon(), 0.25);
  for (double v : p.values()) {
    EXPECT_GE(v, 0.25);
    EXPECT_LE(v, 0.5);
  }
}

TEST(ExpectedObservations, Examples) {
  const auto k3 = NominalGraph::complete(3);
  EXPECT_DOUBLE_EQ(gb::expected_observations(k3, gb::EdgeProbabilityTable::equal(k3, 0.25), 0), 0.75);
  const auto b = NominalGraph::bandit(4);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(gb::expected_observations(b, gb::EdgeProbabilityTable::equal(b, 1.0), i), 1.0);
  }
  const auto k2 = NominalGraph::complete(2);
  const gb::EdgeProbabilityTable p(k2, {0.5, 0.5, 0.3, 0.9}, 0.3);
  EXPECT_NEAR(gb::expected_observations(k2, p, 1), 1.2, 1e-15);
  EXPECT_THROW(gb::expected_observations(k2, p, 2), gb::ArgumentError);
}

TEST(GraphFile, ParsesEdgesWithProbabilities) {
  const auto f = gb::parse_graph(
      "# three experts\n"
      "K=3\n"
      "edge 1 1 0.5\n"
      "edge 2 2 0.5\n"
      "edge 3 3 0.5\n"
      "edge 1 3 0.25   # side observation\n");
  EXPECT_TRUE(f.has_probabilities);
  EXPECT_EQ(f.graph.num_experts(), 3u);
  EXPECT_TRUE(f.graph.has_edge(0, 2));
  EXPECT_FALSE(f.graph.has_edge(2, 0));
  EXPECT_EQ(f.probabilities(0, 2), 0.25);
  EXPECT_EQ(f.probabilities.epsilon(), 0.25);
}

TEST(GraphFile, Shorthands) {
  const auto c = gb::parse_graph("K=4\ncomplete 0.3\n");
  EXPECT_EQ(c.graph, NominalGraph::complete(4));
  EXPECT_EQ(c.probabilities(3, 1), 0.3);
  const auto b = gb::parse_graph("K=2\nbandit\n");
  EXPECT_EQ(b.graph, NominalGraph::bandit(2));
  EXPECT_FALSE(b.has_probabilities);
  EXPECT_EQ(b.probabilities(1, 1), 1.0);
}

TEST(GraphFile, Errors) {
  EXPECT_THROW(gb::parse_graph("K=2\nedge 1 1\nedge 1 2\n"), gb::IngestionError);  // no self-loop at 2
  EXPECT_THROW(gb::parse_graph("edge 1 1\n"), gb::IngestionError);
  EXPECT_THROW(gb::parse_graph("K=2\nedge 1 3\n"), gb::IngestionError);
  EXPECT_THROW(gb::parse_graph("K=2\nbandit 1.5\n"), gb::IngestionError);
  EXPECT_THROW(gb::parse_graph("K=2\nfrobnicate\n"), gb::IngestionError);
  EXPECT_THROW(gb::load_graph_file("/nonexistent/graph.txt"), gb::IngestionError);
}
