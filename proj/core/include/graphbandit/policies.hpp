#pragma once

// Per-round building blocks of Exp3-IP, Exp3-UP and Exp3-GR. The Learner in
// learner.hpp strings these together; they are exposed for testing and for
// the Monte-Carlo oracle suite.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "graphbandit/estimator.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/rng.hpp"

namespace graphbandit {

/// pi_i = (1-eta) w_i/W + eta F_i / (sum_{j in D} F_j) [i in D].
Pmf exp3ip_pmf(const WeightVector& w, double eta, const NominalGraph& g,
               const EdgeProbabilityTable& p, const VertexSet& dominating);

/// q_i = sum over in-neighbors j of pi_j p_ji.
double exp3ip_observation_prob(const Pmf& pmf, const NominalGraph& g,
                               const EdgeProbabilityTable& p, std::size_t i);

/// pi_i = (1-eta) w_i/W + eta/|D| [i in D]. Shared by Exp3-UP and Exp3-GR.
Pmf exp3up_pmf(const WeightVector& w, double eta, const VertexSet& dominating);

// Round-robin expert for exploration round t (1-based) within a phase of
// K*M rounds: ((t-1) mod K). Throws ArgumentError outside 1..K*M.
std::size_t exploration_index(std::size_t t, std::size_t num_experts, std::size_t M);

/// One Bernoulli draw X_ij(t) on an out-edge of the chosen expert.
struct EdgeDraw {
  std::size_t target;
  bool revealed;
};

/// Sample-mean estimates of p_ij from the rounds in which i was chosen.
class ProbabilityEstimator {
 public:
  explicit ProbabilityEstimator(std::size_t num_experts = 0);

  std::size_t num_experts() const noexcept { return k_; }
  std::uint64_t count(std::size_t i, std::size_t j) const noexcept { return counts_[i * k_ + j]; }
  std::uint64_t sum(std::size_t i, std::size_t j) const noexcept { return sums_[i * k_ + j]; }
  /// sums / counts, or 0 before the first sample.
  double estimate(std::size_t i, std::size_t j) const noexcept;

  // `draws` must cover exactly the out-edges of `chosen` in g; anything else
  // is a ContractViolation.
  void update(std::size_t chosen, const NominalGraph& g, std::span<const EdgeDraw> draws);

  std::span<const std::uint64_t> counts() const noexcept { return counts_; }
  std::span<const std::uint64_t> sums() const noexcept { return sums_; }
  static ProbabilityEstimator from_raw(std::size_t k, std::vector<std::uint64_t> counts,
                                       std::vector<std::uint64_t> sums);

  friend bool operator==(const ProbabilityEstimator&, const ProbabilityEstimator&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> sums_;
};

/// q-hat_i = sum over in-neighbors j of pi_j (p-hat_ji + xi/sqrt(M)). Not clamped.
/// Throws PhaseOrderError if any in-edge of i has fewer than M samples.
double exp3up_qhat(const Pmf& pmf, const NominalGraph& g, const ProbabilityEstimator& est,
                   double xi, std::size_t M, std::size_t i);

double exp3up_loss_estimate(double loss, double qhat, bool observed);

/// The last `capacity` Bernoulli samples of X_ij for every edge.
class ResampleBuffer {
 public:
  explicit ResampleBuffer(std::size_t num_experts = 0, std::size_t capacity = 0);

  std::size_t num_experts() const noexcept { return k_; }
  std::size_t capacity() const noexcept { return capacity_; }
  /// Growing keeps existing samples; shrinking drops the oldest.
  void set_capacity(std::size_t capacity);

  void push(std::size_t i, std::size_t j, bool sample);
  const std::deque<std::uint8_t>& samples(std::size_t i, std::size_t j) const noexcept {
    return edges_[i * k_ + j];
  }
  /// True when every edge of g holds at least `m` samples.
  bool full(const NominalGraph& g, std::size_t m) const noexcept;

  friend bool operator==(const ResampleBuffer&, const ResampleBuffer&) = default;

 private:
  std::size_t k_;
  std::size_t capacity_;
  std::vector<std::deque<std::uint8_t>> edges_;
};

// One round of geometric resampling. M experts d_1..d_M are drawn i.i.d.
// from the pmf (lazily, on the first query); each edge buffer is read through
// a fresh uniform permutation that is materialized only as far as needed.
// Q_i is the first trial u whose drawn expert reveals i, capped at M.
class ResamplingRound {
 public:
  ResamplingRound(const Pmf& pmf, const NominalGraph& g, const ResampleBuffer& buffers,
                  std::size_t M, Rng& rng);

  /// Q_i in [1, M]. Throws PhaseOrderError if an in-edge buffer of i holds
  /// fewer than M samples.
  std::size_t count(std::size_t i);

 private:
  struct Permutation {
    std::vector<std::uint8_t> values;
    std::size_t fixed = 0;
  };
  std::uint8_t permuted(std::size_t j, std::size_t i, std::size_t u);

  const Pmf& pmf_;
  const NominalGraph& g_;
  const ResampleBuffer& buffers_;
  std::size_t m_;
  Rng& rng_;
  std::vector<std::size_t> trials_;
  std::vector<std::optional<Permutation>> perms_;
};

/// Single-arm convenience wrapper around ResamplingRound.
std::size_t geometric_resample(std::size_t i, const Pmf& pmf, const NominalGraph& g,
                               const ResampleBuffer& buffers, std::size_t M, Rng& rng);

/// Q * loss if observed, else 0. Q must lie in [1, M].
double gr_loss_estimate(double loss, std::size_t Q, std::size_t M, bool observed);

}  // namespace graphbandit
