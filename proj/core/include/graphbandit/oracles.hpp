#pragma once

// Monte-Carlo checks of the estimators against their closed-form
// expectations. Shared by the `oracle` CLI subcommand and the acceptance
// suite.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace graphbandit {

/// Sample mean with its standard error, next to the value it should match.
struct MeanCheck {
  double mean = 0.0;
  double std_error = 0.0;
  double expected = 0.0;

  double z() const noexcept;
  bool within(double sigmas) const noexcept;
};

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x) noexcept;
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;  // unbiased
  double std_error() const noexcept;
  MeanCheck check(double expected) const noexcept { return {mean_, std_error(), expected}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct IpUnbiasednessReport {
  std::vector<MeanCheck> first_moment;   // mean of l-hat_i vs l_i
  std::vector<MeanCheck> second_moment;  // mean of l-hat_i^2 vs l_i^2 / q_i
};

// Complete graph on K experts with every p equal to `p`, weights `weights`,
// pmf from the Exp3-IP rule at `eta`, fixed `losses`. Runs the
// select -> realize -> estimate pipeline `draws` times.
IpUnbiasednessReport ip_unbiasedness(std::span<const double> weights, std::span<const double> losses,
                                     double p, double eta, std::size_t draws, std::uint64_t seed);

struct GrResamplingReport {
  MeanCheck q_count;        // mean of Q vs (1-(1-q)^M)/q
  MeanCheck loss_estimate;  // mean of l-tilde vs (1-(1-q)^M) l
};

// Two experts, complete graph, pmf (1/2, 1/2), every p = q so the
// observation probability of expert 1 is q. Buffers are refilled with fresh
// Bernoulli(q) samples for every draw.
GrResamplingReport gr_resampling(double q, std::size_t M, double loss, std::size_t draws,
                                 std::uint64_t seed);

struct EstimationReport {
  std::size_t replicates = 0;
  std::size_t failed_replicates = 0;  // some edge missed the tolerance
  double max_abs_error = 0.0;
};

// Runs only the exploration phase of Exp3-UP (K*M rounds) on a complete
// graph whose edge (i,j) has p = levels[(i*K + j) mod |levels|] and checks
// |p-hat - p| <= tolerance on every edge.
EstimationReport probability_estimation(std::size_t num_experts, std::size_t M,
                                        std::span<const double> levels, double tolerance,
                                        std::size_t replicates, std::uint64_t seed);

}  // namespace graphbandit
