#pragma once

#include <cstddef>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "graphbandit/errors.hpp"
#include "graphbandit/feedback.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/learner.hpp"
#include "graphbandit/rng.hpp"

namespace graphbandit {

/// Seed of the named sub-stream of a master seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(master ^ splitmix64(stream));
}

/// T x K matrix of losses in [0, 1]; row t-1 holds round t.
class LossTable {
 public:
  LossTable() = default;
  /// Throws ContractViolation if any value is outside [0, 1].
  LossTable(std::size_t rounds, std::size_t num_experts, std::vector<double> values);

  std::size_t rounds() const noexcept { return rounds_; }
  std::size_t num_experts() const noexcept { return k_; }
  /// Losses of round t (1-based).
  std::span<const double> round(std::size_t t) const noexcept {
    return {values_.data() + (t - 1) * k_, k_};
  }
  double operator()(std::size_t t, std::size_t i) const noexcept { return values_[(t - 1) * k_ + i]; }
  std::span<const double> values() const noexcept { return values_; }
  /// FNV-1a over the raw bytes; used to check common random numbers.
  std::uint64_t hash() const noexcept;

 private:
  std::size_t rounds_ = 0;
  std::size_t k_ = 0;
  std::vector<double> values_;
};

enum class AdversaryKind {
  kFixedTable,     // explicit loss matrix
  kStochasticGap,  // Bernoulli losses, mean 1/2, best arm mean 1/2 - gap
  kSwitching,      // like kStochasticGap, best arm rotates every `period` rounds
  kDataset,        // squared prediction errors of an expert pool
};

/// Oblivious adversary description.
struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::kStochasticGap;
  std::size_t num_experts = 0;
  double gap = 0.1;
  /// Best arm for kStochasticGap / first best arm for kSwitching; drawn from
  /// the adversary stream when empty.
  std::optional<std::size_t> best;
  std::size_t period = 1000;
  LossTable table;  // kFixedTable / kDataset

  static AdversarySpec fixed_table(LossTable t);
  static AdversarySpec dataset(LossTable t);
  static AdversarySpec stochastic_gap(std::size_t k, double gap,
                                      std::optional<std::size_t> best = std::nullopt);
  static AdversarySpec switching(std::size_t k, double gap, std::size_t period);
};

/// Materializes T rounds of losses. Table-backed kinds require T <= rows.
LossTable generate_losses(const AdversarySpec& spec, std::size_t horizon, Rng& rng);

/// CSV of shape T x K, optional header row, every value in [0, 1].
LossTable load_loss_csv(const std::filesystem::path& path);

/// Graph and probabilities per round: either fixed, or cycling through a list.
class FeedbackModel {
 public:
  static FeedbackModel fixed(NominalGraph g, EdgeProbabilityTable p);
  /// Round t uses entry (t-1) mod n.
  static FeedbackModel cycling(std::vector<std::pair<NominalGraph, EdgeProbabilityTable>> steps);

  bool is_static() const noexcept { return steps_.size() == 1; }
  std::size_t num_experts() const noexcept { return steps_.front().first.num_experts(); }
  const NominalGraph& graph(std::size_t t) const noexcept { return steps_[(t - 1) % steps_.size()].first; }
  const EdgeProbabilityTable& probabilities(std::size_t t) const noexcept {
    return steps_[(t - 1) % steps_.size()].second;
  }

 private:
  explicit FeedbackModel(std::vector<std::pair<NominalGraph, EdgeProbabilityTable>> steps);
  std::vector<std::pair<NominalGraph, EdgeProbabilityTable>> steps_;
};

// Draws X ~ Bernoulli(p(chosen, j)) for every out-neighbor j in ascending
// order and reveals losses[j] when X = 1. The chosen expert's own loss is
// revealed only through its self-loop.
FeedbackEvent realize_feedback(const NominalGraph& g, const EdgeProbabilityTable& p,
                               std::size_t chosen, std::span<const double> losses, Rng& rng,
                               std::size_t round = 0);

struct RunTrace {
  std::uint64_t seed = 0;
  std::vector<std::size_t> chosen;
  std::vector<double> incurred;
  /// Total loss of each fixed expert over the run.
  std::vector<double> expert_cumulative;
  /// Rounds in which the chosen expert's own loss was observed.
  std::size_t own_observed = 0;

  std::size_t rounds() const noexcept { return chosen.size(); }
  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// Sum of incurred losses minus the best fixed expert's total.
double empirical_regret(const RunTrace& trace);

/// Cumulative regret after each round 1..T.
std::vector<double> regret_curve(const RunTrace& trace, const LossTable& losses);

/// Anything with select/update shaped like Learner can drive an episode.
template <class P>
concept Policy = requires(P p, std::size_t t, const NominalGraph& g,
                          const EdgeProbabilityTable* prob, const FeedbackEvent& fb) {
  { p.select(t, g, prob) } -> std::convertible_to<std::size_t>;
  p.update(fb);
};

/// Step-wise select -> realize -> update loop over a loss table.
template <Policy P>
class Episode {
 public:
  Episode(P& policy, const LossTable& losses, const FeedbackModel& model, bool informative,
          Rng environment_rng, RunTrace trace = {})
      : policy_(policy), losses_(losses), model_(model), informative_(informative),
        env_(environment_rng), trace_(std::move(trace)) {
    if (losses.num_experts() != model.num_experts()) {
      throw ArgumentError("episode: loss table and graph disagree on K");
    }
    if (trace_.expert_cumulative.empty()) trace_.expert_cumulative.assign(losses.num_experts(), 0.0);
  }

  bool done() const noexcept { return trace_.rounds() >= losses_.rounds(); }
  std::size_t next_round() const noexcept { return trace_.rounds() + 1; }

  void step() {
    const std::size_t t = next_round();
    const NominalGraph& g = model_.graph(t);
    const EdgeProbabilityTable& p = model_.probabilities(t);
    const std::size_t choice = policy_.select(t, g, informative_ ? &p : nullptr);
    const auto row = losses_.round(t);
    FeedbackEvent fb = realize_feedback(g, p, choice, row, env_, t);
    if (fb.saw(choice)) ++trace_.own_observed;
    trace_.chosen.push_back(choice);
    trace_.incurred.push_back(fb.incurred_loss);
    for (std::size_t i = 0; i < row.size(); ++i) trace_.expert_cumulative[i] += row[i];
    policy_.update(fb);
  }

  void run() {
    while (!done()) step();
  }

  const RunTrace& trace() const noexcept { return trace_; }
  const Rng& environment_rng() const noexcept { return env_; }

 private:
  P& policy_;
  const LossTable& losses_;
  const FeedbackModel& model_;
  bool informative_;
  Rng env_;
  RunTrace trace_;
};

// Full episode for a fresh learner. The learner and the environment draw from
// disjoint sub-streams of `seed`.
RunTrace run_episode(const LearnerConfig& config, const LossTable& losses,
                     const FeedbackModel& model, bool informative, std::uint64_t seed);

/// Same, generating the losses from `adversary` on its own sub-stream.
RunTrace run_episode(const LearnerConfig& config, const AdversarySpec& adversary,
                     const FeedbackModel& model, std::size_t horizon, bool informative,
                     std::uint64_t seed);

}  // namespace graphbandit
