#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "graphbandit/rng.hpp"

namespace graphbandit {

/// Strictly positive expert weights, stored as natural logs so that long
/// horizons cannot underflow the normalizer.
class WeightVector {
 public:
  static WeightVector uniform(std::size_t num_experts);
  static WeightVector from_log(std::vector<double> log_weights);
  /// Throws ArgumentError unless every weight is positive and finite.
  static WeightVector from_linear(std::span<const double> weights);

  std::size_t size() const noexcept { return log_w_.size(); }
  std::span<const double> log_weights() const noexcept { return log_w_; }

  /// log W, computed by a max-shifted log-sum-exp.
  double log_total() const;
  /// w_i / W for every i.
  std::vector<double> normalized() const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  explicit WeightVector(std::vector<double> log_w) : log_w_(std::move(log_w)) {}
  std::vector<double> log_w_;
};

/// Probability mass function over experts.
///
/// Construction accepts a sum that drifts from 1 by at most kTolerance (and
/// renormalizes); anything further off, or any negative / non-finite entry,
/// throws InvariantViolation.
class Pmf {
 public:
  static constexpr double kTolerance = 1e-9;

  explicit Pmf(std::vector<double> probs);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const noexcept { return p_[i]; }
  std::span<const double> values() const noexcept { return p_; }

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  std::vector<double> p_;
};

/// w'_i = w_i * exp(-eta * estimate_i).
WeightVector exp_weight_update(const WeightVector& w, double eta,
                               std::span<const double> loss_estimates);

/// loss / q if observed, else 0.
double importance_loss_estimate(double loss, double q, bool observed);

/// Inverse-CDF draw over ascending indices; consumes exactly one uniform.
std::size_t sample_index(const Pmf& pmf, Rng& rng);

}  // namespace graphbandit
