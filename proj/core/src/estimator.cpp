#include "graphbandit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "graphbandit/errors.hpp"

namespace graphbandit {

WeightVector WeightVector::uniform(std::size_t num_experts) {
  if (num_experts == 0) throw ArgumentError("WeightVector: need at least one expert");
  return WeightVector(std::vector<double>(num_experts, 0.0));
}

WeightVector WeightVector::from_log(std::vector<double> log_weights) {
  if (log_weights.empty()) throw ArgumentError("WeightVector: need at least one expert");
  for (double l : log_weights) {
    if (!std::isfinite(l)) throw NumericError("WeightVector: non-finite log-weight");
  }
  return WeightVector(std::move(log_weights));
}

WeightVector WeightVector::from_linear(std::span<const double> weights) {
  std::vector<double> log_w;
  log_w.reserve(weights.size());
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ArgumentError("WeightVector: weights must be positive and finite");
    }
    log_w.push_back(std::log(w));
  }
  return from_log(std::move(log_w));
}

double WeightVector::log_total() const {
  const double m = *std::max_element(log_w_.begin(), log_w_.end());
  double s = 0.0;
  for (double l : log_w_) s += std::exp(l - m);
  return m + std::log(s);
}

std::vector<double> WeightVector::normalized() const {
  const double m = *std::max_element(log_w_.begin(), log_w_.end());
  std::vector<double> out(log_w_.size());
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(log_w_[i] - m);
    s += out[i];
  }
  for (double& v : out) v /= s;
  return out;
}

Pmf::Pmf(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw InvariantViolation("Pmf: empty");
  double s = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "Pmf: invalid entry " << v;
      throw InvariantViolation(os.str());
    }
    s += v;
  }
  if (std::abs(s - 1.0) > kTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "Pmf: entries sum to " << s;
    throw InvariantViolation(os.str());
  }
  if (s != 1.0) {
    for (double& v : p_) v /= s;
  }
}

WeightVector exp_weight_update(const WeightVector& w, double eta,
                               std::span<const double> loss_estimates) {
  if (loss_estimates.size() != w.size()) {
    throw ArgumentError("exp_weight_update: estimate count does not match K");
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ArgumentError("exp_weight_update: bad eta");
  std::vector<double> log_w(w.log_weights().begin(), w.log_weights().end());
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    const double est = loss_estimates[i];
    if (!std::isfinite(est)) throw NumericError("exp_weight_update: non-finite loss estimate");
    if (est < 0.0) throw ArgumentError("exp_weight_update: negative loss estimate");
    log_w[i] -= eta * est;
  }
  return WeightVector::from_log(std::move(log_w));
}

double importance_loss_estimate(double loss, double q, bool observed) {
  if (!observed) return 0.0;
  if (!(q > 0.0)) {
    throw InvariantViolation("importance_loss_estimate: observed loss with q <= 0");
  }
  return loss / q;
}

std::size_t sample_index(const Pmf& pmf, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last_positive = pmf.size();
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] <= 0.0) continue;
    last_positive = i;
    cum += pmf[i];
    if (u < cum) return i;
  }
  if (last_positive == pmf.size()) throw InvariantViolation("sample_index: all-zero pmf");
  return last_positive;
}

}  // namespace graphbandit
