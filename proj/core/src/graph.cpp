#include "graphbandit/graph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "graphbandit/errors.hpp"

namespace graphbandit {
namespace {

void check_index(std::size_t k, std::size_t i, const char* what) {
  if (i >= k) {
    throw ArgumentError(std::string(what) + ": expert index " + std::to_string(i) +
                        " out of range for K=" + std::to_string(k));
  }
}

using Mask = std::uint32_t;

std::size_t max_independent(Mask candidates, const std::vector<Mask>& neighbors) {
  if (candidates == 0) return 0;
  const int v = std::countr_zero(candidates);
  const Mask without = candidates & ~(Mask{1} << v);
  // A vertex with no remaining neighbors is always in some maximum set.
  if ((neighbors[v] & without) == 0) return 1 + max_independent(without, neighbors);
  const std::size_t take = 1 + max_independent(without & ~neighbors[v], neighbors);
  const std::size_t skip = max_independent(without, neighbors);
  return std::max(take, skip);
}

}  // namespace

VertexSet::VertexSet(std::initializer_list<std::size_t> members)
    : VertexSet(std::vector<std::size_t>(members)) {}

VertexSet::VertexSet(std::vector<std::size_t> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw ArgumentError("VertexSet: duplicate member");
  }
}

bool VertexSet::contains(std::size_t i) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), i);
}

NominalGraph::NominalGraph(std::size_t num_experts, std::vector<std::uint8_t> adjacency)
    : k_(num_experts), adj_(std::move(adjacency)) {
  if (k_ == 0) throw ArgumentError("NominalGraph: K must be at least 1");
  if (adj_.size() != k_ * k_) {
    throw ArgumentError("NominalGraph: adjacency must be K*K");
  }
  for (std::size_t i = 0; i < k_; ++i) {
    if (!has_edge(i, i)) {
      throw ArgumentError("NominalGraph: missing self-loop at expert " + std::to_string(i + 1));
    }
  }
  for (auto& a : adj_) a = a ? 1 : 0;
}

NominalGraph NominalGraph::complete(std::size_t num_experts) {
  return NominalGraph(num_experts, std::vector<std::uint8_t>(num_experts * num_experts, 1));
}

NominalGraph NominalGraph::bandit(std::size_t num_experts) {
  std::vector<std::uint8_t> adj(num_experts * num_experts, 0);
  for (std::size_t i = 0; i < num_experts; ++i) adj[i * num_experts + i] = 1;
  return NominalGraph(num_experts, std::move(adj));
}

NominalGraph NominalGraph::with_edges(
    std::size_t num_experts, std::span<const std::pair<std::size_t, std::size_t>> edges) {
  std::vector<std::uint8_t> adj(num_experts * num_experts, 0);
  for (std::size_t i = 0; i < num_experts; ++i) adj[i * num_experts + i] = 1;
  for (auto [i, j] : edges) {
    check_index(num_experts, i, "NominalGraph::with_edges");
    check_index(num_experts, j, "NominalGraph::with_edges");
    adj[i * num_experts + j] = 1;
  }
  return NominalGraph(num_experts, std::move(adj));
}

std::size_t NominalGraph::num_edges() const noexcept {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1}));
}

EdgeProbabilityTable::EdgeProbabilityTable(const NominalGraph& g, std::vector<double> probs,
                                           double epsilon)
    : k_(g.num_experts()), p_(std::move(probs)), epsilon_(epsilon) {
  if (p_.size() != k_ * k_) throw ArgumentError("EdgeProbabilityTable: probs must be K*K");
  if (!(epsilon_ > 0.0 && epsilon_ <= 1.0)) {
    throw ArgumentError("EdgeProbabilityTable: epsilon must lie in (0, 1]");
  }
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      double& p = p_[i * k_ + j];
      if (!g.has_edge(i, j)) {
        p = 0.0;
        continue;
      }
      if (!(p >= epsilon_ && p <= 1.0)) {
        std::ostringstream os;
        os << "EdgeProbabilityTable: p(" << i + 1 << "," << j + 1 << ")=" << p
           << " outside [epsilon=" << epsilon_ << ", 1]";
        throw ArgumentError(os.str());
      }
    }
  }
}

EdgeProbabilityTable EdgeProbabilityTable::equal(const NominalGraph& g, double value) {
  const std::size_t k = g.num_experts();
  return EdgeProbabilityTable(g, std::vector<double>(k * k, value), value);
}

EdgeProbabilityTable EdgeProbabilityTable::uniform(const NominalGraph& g, double lo, double hi,
                                                   Rng& rng) {
  if (!(lo > 0.0 && lo <= hi && hi <= 1.0)) {
    throw ArgumentError("EdgeProbabilityTable::uniform requires 0 < lo <= hi <= 1");
  }
  const std::size_t k = g.num_experts();
  std::vector<double> probs(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (g.has_edge(i, j)) probs[i * k + j] = std::min(hi, lo + (hi - lo) * rng.uniform());
    }
  }
  return EdgeProbabilityTable(g, std::move(probs), lo);
}

VertexSet out_neighbors(const NominalGraph& g, std::size_t i) {
  check_index(g.num_experts(), i, "out_neighbors");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < g.num_experts(); ++j) {
    if (g.has_edge(i, j)) out.push_back(j);
  }
  return VertexSet(std::move(out));
}

VertexSet in_neighbors(const NominalGraph& g, std::size_t i) {
  check_index(g.num_experts(), i, "in_neighbors");
  std::vector<std::size_t> in;
  for (std::size_t j = 0; j < g.num_experts(); ++j) {
    if (g.has_edge(j, i)) in.push_back(j);
  }
  return VertexSet(std::move(in));
}

VertexSet greedy_dominating_set(const NominalGraph& g) {
  const std::size_t k = g.num_experts();
  std::vector<bool> covered(k, false);
  std::vector<std::size_t> chosen;
  std::size_t remaining = k;
  while (remaining > 0) {
    std::size_t best = k;
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t gain = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (g.has_edge(i, j) && !covered[j]) ++gain;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best == k) throw InvariantViolation("greedy_dominating_set: no progress");
    chosen.push_back(best);
    for (std::size_t j = 0; j < k; ++j) {
      if (g.has_edge(best, j) && !covered[j]) {
        covered[j] = true;
        --remaining;
      }
    }
  }
  return VertexSet(std::move(chosen));
}

bool is_dominating_set(const NominalGraph& g, const VertexSet& d) {
  for (std::size_t j = 0; j < g.num_experts(); ++j) {
    const bool hit = std::any_of(d.begin(), d.end(), [&](std::size_t i) { return g.has_edge(i, j); });
    if (!hit) return false;
  }
  return true;
}

std::size_t independence_number(const NominalGraph& g) {
  const std::size_t k = g.num_experts();
  if (k > kMaxIndependenceNumberSize) {
    throw UnsupportedSize("independence_number: exact search supports K <= " +
                          std::to_string(kMaxIndependenceNumberSize) + ", got K=" +
                          std::to_string(k));
  }
  std::vector<Mask> neighbors(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j && (g.has_edge(i, j) || g.has_edge(j, i))) neighbors[i] |= Mask{1} << j;
    }
  }
  const Mask all = k == 32 ? ~Mask{0} : (Mask{1} << k) - 1;
  return max_independent(all, neighbors);
}

double expected_observations(const NominalGraph& g, const EdgeProbabilityTable& p, std::size_t i) {
  check_index(g.num_experts(), i, "expected_observations");
  if (p.num_experts() != g.num_experts()) {
    throw ArgumentError("expected_observations: probability table size mismatch");
  }
  double f = 0.0;
  for (std::size_t j = 0; j < g.num_experts(); ++j) {
    if (g.has_edge(i, j)) f += p(i, j);
  }
  return f;
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw IngestionError("graph file line " + std::to_string(line) + ": " + msg);
}

std::size_t parse_count(const std::string& tok, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) parse_fail(line, "bad integer '" + tok + "'");
  return v;
}

double parse_prob(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    parse_fail(line, "bad probability '" + tok + "'");
  }
  if (used != tok.size()) parse_fail(line, "bad probability '" + tok + "'");
  if (!(v > 0.0 && v <= 1.0)) parse_fail(line, "probability " + tok + " outside (0, 1]");
  return v;
}

}  // namespace

GraphFile parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> k;
  std::vector<std::uint8_t> adj;
  std::vector<double> probs;
  bool any_prob = false;

  auto set_edge = [&](std::size_t i, std::size_t j, std::optional<double> p) {
    adj[i * *k + j] = 1;
    probs[i * *k + j] = p.value_or(1.0);
    any_prob = any_prob || p.has_value();
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (!k) {
      if (tok.size() != 1 || tok[0].rfind("K=", 0) != 0) parse_fail(line_no, "expected 'K=<int>' header");
      k = parse_count(tok[0].substr(2), line_no);
      if (*k == 0) parse_fail(line_no, "K must be at least 1");
      adj.assign(*k * *k, 0);
      probs.assign(*k * *k, 0.0);
      continue;
    }
    const std::string& kw = tok[0];
    if (kw == "edge") {
      if (tok.size() != 3 && tok.size() != 4) parse_fail(line_no, "expected 'edge i j [p]'");
      const std::size_t i = parse_count(tok[1], line_no);
      const std::size_t j = parse_count(tok[2], line_no);
      if (i < 1 || i > *k || j < 1 || j > *k) parse_fail(line_no, "edge endpoint out of range 1..K");
      std::optional<double> p;
      if (tok.size() == 4) p = parse_prob(tok[3], line_no);
      set_edge(i - 1, j - 1, p);
    } else if (kw == "complete" || kw == "bandit") {
      if (tok.size() > 2) parse_fail(line_no, "expected '" + kw + " [p]'");
      std::optional<double> p;
      if (tok.size() == 2) p = parse_prob(tok[1], line_no);
      for (std::size_t i = 0; i < *k; ++i) {
        for (std::size_t j = 0; j < *k; ++j) {
          if (kw == "complete" || i == j) set_edge(i, j, p);
        }
      }
    } else {
      parse_fail(line_no, "unknown directive '" + kw + "'");
    }
  }
  if (!k) throw IngestionError("graph file: missing 'K=<int>' header");
  for (std::size_t i = 0; i < *k; ++i) {
    if (!adj[i * *k + i]) {
      throw IngestionError("graph file: missing self-loop 'edge " + std::to_string(i + 1) + " " +
                           std::to_string(i + 1) + "'");
    }
  }
  NominalGraph g(*k, std::move(adj));
  double eps = 1.0;
  for (std::size_t i = 0; i < *k; ++i) {
    for (std::size_t j = 0; j < *k; ++j) {
      if (g.has_edge(i, j)) eps = std::min(eps, probs[i * *k + j]);
    }
  }
  EdgeProbabilityTable table(g, std::move(probs), eps);
  return GraphFile{std::move(g), std::move(table), any_prob};
}

GraphFile load_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open graph file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

}  // namespace graphbandit
