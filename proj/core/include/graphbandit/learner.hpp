#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphbandit/estimator.hpp"
#include "graphbandit/feedback.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/policies.hpp"
#include "graphbandit/rng.hpp"
#include "graphbandit/schedule.hpp"

namespace graphbandit {

enum class Algorithm {
  kExp3,     // bandit baseline: only the chosen expert's own loss is used
  kExp3Dom,  // Exp3-IP with every p_ij taken as 1
  kExp3Ip,   // informative probabilities
  kExp3Up,   // estimated probabilities
  kExp3Gr,   // geometric resampling
};

std::string_view to_string(Algorithm a) noexcept;
/// Accepts the CLI spellings exp3, exp3-dom, exp3-ip, exp3-up, exp3-gr.
Algorithm parse_algorithm(std::string_view name);

/// True for the algorithms that need a static nominal graph.
constexpr bool requires_static_graph(Algorithm a) noexcept {
  return a == Algorithm::kExp3Up || a == Algorithm::kExp3Gr;
}

struct LearnerConfig {
  Algorithm algorithm = Algorithm::kExp3Ip;
  Schedule schedule = Schedule::inverse_sqrt();
  /// Minimum samples per edge before Exp3-UP/GR leave exploration.
  /// Replaced per epoch under the doubling schedule.
  std::size_t M = 25;
  /// Confidence width for Exp3-UP; must be >= 1.
  double xi = 1.0;
  /// Lower bound on edge probabilities, read only by Exp3-GR's doubling schedule.
  double epsilon = 0.25;

  /// Throws ArgumentError on an invalid combination.
  void validate() const;
};

/// One online learner. Calls alternate: select(t, ...) then update(feedback for t).
///
/// Exp3-IP, Exp3-DOM and Exp3 read the graph passed to select() every round,
/// so it may change over time. Exp3-UP and Exp3-GR are bound to the graph
/// given at construction and reject any other.
class Learner {
 public:
  Learner(LearnerConfig config, NominalGraph graph, std::uint64_t seed);

  /// `informative` carries the true p_ij; Exp3-IP requires it, the others
  /// ignore it.
  std::size_t select(std::size_t t, const NominalGraph& g,
                     const EdgeProbabilityTable* informative = nullptr);
  void update(const FeedbackEvent& feedback);

  const LearnerConfig& config() const noexcept { return config_; }
  Algorithm algorithm() const noexcept { return config_.algorithm; }
  std::size_t num_experts() const noexcept { return graph_.num_experts(); }
  /// Completed rounds.
  std::size_t rounds() const noexcept { return rounds_; }
  const WeightVector& weights() const noexcept { return weights_; }
  /// Pmf drawn from in the pending round; empty during exploration.
  const std::optional<Pmf>& current_pmf() const noexcept { return pending_pmf_; }
  /// Learning rate for the pending (or most recent) round.
  double current_eta() const noexcept { return eta_; }
  std::size_t current_M() const noexcept { return m_; }
  double current_xi() const noexcept { return xi_; }
  bool exploring() const noexcept { return explore_remaining_ > 0; }
  std::size_t exploration_remaining() const noexcept { return explore_remaining_; }
  const DoublingState& doubling() const noexcept { return doubling_; }
  /// Number of doubling restarts so far.
  std::size_t restarts() const noexcept { return restarts_; }
  const ProbabilityEstimator& probability_estimator() const noexcept { return estimator_; }
  const ResampleBuffer& resample_buffer() const noexcept { return buffer_; }

  /// Versioned JSON snapshot; only valid between rounds.
  std::string snapshot() const;
  static Learner restore(std::string_view snapshot);

 private:
  void begin_doubling_epoch(int epoch);
  void restart_weights();
  const VertexSet& dominating_for(const NominalGraph& g);
  std::vector<EdgeDraw> edge_draws(const FeedbackEvent& fb) const;
  void apply_update(double eta, const std::vector<double>& estimates);

  LearnerConfig config_;
  NominalGraph graph_;
  VertexSet dominating_;
  Rng rng_;
  WeightVector weights_;

  std::size_t rounds_ = 0;
  double eta_ = 0.0;
  std::size_t m_ = 0;
  double xi_ = 0.0;
  DoublingState doubling_;
  std::size_t restarts_ = 0;

  // Exploration bookkeeping (Exp3-UP / Exp3-GR).
  std::size_t explore_remaining_ = 0;
  std::size_t explore_done_ = 0;  // within the current phase

  ProbabilityEstimator estimator_;
  ResampleBuffer buffer_;

  // Cached dominating set for the most recent graph seen by select().
  std::optional<NominalGraph> cached_graph_;
  VertexSet cached_dominating_;

  // State of the round between select() and update().
  bool pending_ = false;
  std::size_t pending_choice_ = 0;
  bool pending_exploration_ = false;
  std::optional<Pmf> pending_pmf_;
  std::vector<double> pending_q_;
};

}  // namespace graphbandit
