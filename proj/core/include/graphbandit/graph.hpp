#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "graphbandit/rng.hpp"

namespace graphbandit {

/// Ordered, duplicate-free set of 0-based expert indices.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<std::size_t> members);
  explicit VertexSet(std::vector<std::size_t> members);

  bool contains(std::size_t i) const noexcept;
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  const std::vector<std::size_t>& members() const noexcept { return members_; }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<std::size_t> members_;
};

/// Directed nominal feedback graph. Edge (i, j) means choosing i may reveal
/// the loss of j. Every vertex carries a self-loop.
class NominalGraph {
 public:
  /// `adjacency` is row-major K*K. Throws ArgumentError on a missing self-loop
  /// or a non-square matrix.
  NominalGraph(std::size_t num_experts, std::vector<std::uint8_t> adjacency);

  static NominalGraph complete(std::size_t num_experts);
  /// Self-loops only.
  static NominalGraph bandit(std::size_t num_experts);
  /// Self-loops are added for every vertex; `edges` lists the extra ones.
  static NominalGraph with_edges(std::size_t num_experts,
                                 std::span<const std::pair<std::size_t, std::size_t>> edges);

  std::size_t num_experts() const noexcept { return k_; }
  bool has_edge(std::size_t i, std::size_t j) const noexcept { return adj_[i * k_ + j] != 0; }
  std::size_t num_edges() const noexcept;

  friend bool operator==(const NominalGraph&, const NominalGraph&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint8_t> adj_;
};

/// Per-edge observation probabilities p_ij, with lower bound epsilon on edges.
class EdgeProbabilityTable {
 public:
  /// `probs` is row-major K*K. Entries on non-edges are ignored and stored as 0.
  EdgeProbabilityTable(const NominalGraph& g, std::vector<double> probs, double epsilon);

  /// p = value on every edge; epsilon = value.
  static EdgeProbabilityTable equal(const NominalGraph& g, double value);
  /// p ~ U[lo, hi] independently per edge, row-major order; epsilon = lo.
  static EdgeProbabilityTable uniform(const NominalGraph& g, double lo, double hi, Rng& rng);

  std::size_t num_experts() const noexcept { return k_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return p_[i * k_ + j]; }
  double epsilon() const noexcept { return epsilon_; }
  std::span<const double> values() const noexcept { return p_; }

  friend bool operator==(const EdgeProbabilityTable&, const EdgeProbabilityTable&) = default;

 private:
  std::size_t k_;
  std::vector<double> p_;
  double epsilon_;
};

VertexSet out_neighbors(const NominalGraph& g, std::size_t i);
VertexSet in_neighbors(const NominalGraph& g, std::size_t i);

// Greedy set cover over out-neighborhoods: repeatedly take the vertex that
// covers the most still-uncovered vertices, lowest index on ties.
VertexSet greedy_dominating_set(const NominalGraph& g);

/// True if the out-neighborhoods of `d` cover every vertex.
bool is_dominating_set(const NominalGraph& g, const VertexSet& d);

inline constexpr std::size_t kMaxIndependenceNumberSize = 25;

/// Exact independence number, self-loops ignored. Throws UnsupportedSize for
/// K > kMaxIndependenceNumberSize.
std::size_t independence_number(const NominalGraph& g);

/// F_i: expected number of losses revealed when expert i is chosen.
double expected_observations(const NominalGraph& g, const EdgeProbabilityTable& p, std::size_t i);

/// Result of parsing a graph literal file.
struct GraphFile {
  NominalGraph graph;
  EdgeProbabilityTable probabilities;
  /// False when no line carried a probability (every edge defaulted to 1).
  bool has_probabilities = false;
};

// Format:
//   K=<int>
//   edge <i> <j> [p]      (1-based)
//   complete [p]
//   bandit [p]
// '#' starts a comment. Missing self-loops are an error.
GraphFile parse_graph(std::string_view text);
GraphFile load_graph_file(const std::filesystem::path& path);

}  // namespace graphbandit
