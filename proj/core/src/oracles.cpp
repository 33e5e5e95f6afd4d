#include "graphbandit/oracles.hpp"

#include <cmath>

#include "graphbandit/environment.hpp"
#include "graphbandit/errors.hpp"
#include "graphbandit/learner.hpp"
#include "graphbandit/policies.hpp"

namespace graphbandit {

double MeanCheck::z() const noexcept {
  const double diff = std::abs(mean - expected);
  if (std_error == 0.0) return diff == 0.0 ? 0.0 : INFINITY;
  return diff / std_error;
}

bool MeanCheck::within(double sigmas) const noexcept { return z() <= sigmas; }

void RunningStats::add(double x) noexcept {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStats::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::std_error() const noexcept {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

IpUnbiasednessReport ip_unbiasedness(std::span<const double> weights, std::span<const double> losses,
                                     double p, double eta, std::size_t draws, std::uint64_t seed) {
  const std::size_t k = weights.size();
  if (losses.size() != k) throw ArgumentError("ip_unbiasedness: weights and losses differ in size");
  const NominalGraph g = NominalGraph::complete(k);
  const EdgeProbabilityTable probs = EdgeProbabilityTable::equal(g, p);
  const VertexSet d = greedy_dominating_set(g);
  const Pmf pmf = exp3ip_pmf(WeightVector::from_linear(weights), eta, g, probs, d);
  std::vector<double> q(k);
  for (std::size_t i = 0; i < k; ++i) q[i] = exp3ip_observation_prob(pmf, g, probs, i);

  Rng select_rng(derive_seed(seed, streams::kLearner));
  Rng env_rng(derive_seed(seed, streams::kEnvironment));
  std::vector<RunningStats> first(k), second(k);
  for (std::size_t n = 0; n < draws; ++n) {
    const std::size_t chosen = sample_index(pmf, select_rng);
    const FeedbackEvent fb = realize_feedback(g, probs, chosen, losses, env_rng, n + 1);
    for (std::size_t i = 0; i < k; ++i) {
      const double est = importance_loss_estimate(losses[i], q[i], fb.saw(i));
      first[i].add(est);
      second[i].add(est * est);
    }
  }
  IpUnbiasednessReport report;
  for (std::size_t i = 0; i < k; ++i) {
    report.first_moment.push_back(first[i].check(losses[i]));
    report.second_moment.push_back(second[i].check(losses[i] * losses[i] / q[i]));
  }
  return report;
}

GrResamplingReport gr_resampling(double q, std::size_t M, double loss, std::size_t draws,
                                 std::uint64_t seed) {
  if (!(q > 0.0 && q <= 1.0)) throw ArgumentError("gr_resampling: q must lie in (0, 1]");
  const NominalGraph g = NominalGraph::complete(2);
  const EdgeProbabilityTable probs = EdgeProbabilityTable::equal(g, q);
  const Pmf pmf(std::vector<double>{0.5, 0.5});
  const std::vector<double> losses{loss, 0.0};
  Rng buffer_rng(derive_seed(seed, streams::kAdversary));
  Rng learner_rng(derive_seed(seed, streams::kLearner));
  Rng env_rng(derive_seed(seed, streams::kEnvironment));

  RunningStats q_stats, loss_stats;
  for (std::size_t n = 0; n < draws; ++n) {
    ResampleBuffer buf(2, M);
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t u = 0; u < M; ++u) buf.push(j, 0, buffer_rng.bernoulli(q));
    }
    const std::size_t chosen = sample_index(pmf, learner_rng);
    const FeedbackEvent fb = realize_feedback(g, probs, chosen, losses, env_rng, n + 1);
    const std::size_t count = geometric_resample(0, pmf, g, buf, M, learner_rng);
    q_stats.add(static_cast<double>(count));
    loss_stats.add(gr_loss_estimate(loss, count, M, fb.saw(0)));
  }
  const double hit = 1.0 - std::pow(1.0 - q, static_cast<double>(M));
  return {q_stats.check(hit / q), loss_stats.check(hit * loss)};
}

EstimationReport probability_estimation(std::size_t num_experts, std::size_t M,
                                        std::span<const double> levels, double tolerance,
                                        std::size_t replicates, std::uint64_t seed) {
  if (levels.empty()) throw ArgumentError("probability_estimation: no probability levels");
  const std::size_t k = num_experts;
  const NominalGraph g = NominalGraph::complete(k);
  std::vector<double> p(k * k);
  double eps = 1.0;
  for (std::size_t e = 0; e < p.size(); ++e) {
    p[e] = levels[e % levels.size()];
    eps = std::min(eps, p[e]);
  }
  const EdgeProbabilityTable probs(g, p, eps);
  const FeedbackModel model = FeedbackModel::fixed(g, probs);
  const LossTable zero(k * M, k, std::vector<double>(k * M * k, 0.0));

  LearnerConfig cfg;
  cfg.algorithm = Algorithm::kExp3Up;
  cfg.M = M;
  cfg.xi = 1.0;
  EstimationReport report;
  report.replicates = replicates;
  for (std::size_t r = 0; r < replicates; ++r) {
    const std::uint64_t run_seed = splitmix64(seed + r);
    Learner learner(cfg, g, derive_seed(run_seed, streams::kLearner));
    Episode episode(learner, zero, model, false, Rng(derive_seed(run_seed, streams::kEnvironment)));
    episode.run();
    if (learner.exploring()) throw InvariantViolation("probability_estimation: exploration did not finish");
    bool failed = false;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double err = std::abs(learner.probability_estimator().estimate(i, j) - probs(i, j));
        report.max_abs_error = std::max(report.max_abs_error, err);
        failed = failed || err > tolerance;
      }
    }
    if (failed) ++report.failed_replicates;
  }
  return report;
}

}  // namespace graphbandit
