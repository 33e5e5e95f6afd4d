#include "graphbandit/policies.hpp"

#include <cmath>
#include <string>

#include "graphbandit/errors.hpp"

namespace graphbandit {
namespace {

void check_eta(double eta, const char* where) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ArgumentError(std::string(where) + ": eta must lie in [0, 1]");
  }
}

}  // namespace

Pmf exp3ip_pmf(const WeightVector& w, double eta, const NominalGraph& g,
               const EdgeProbabilityTable& p, const VertexSet& dominating) {
  check_eta(eta, "exp3ip_pmf");
  const std::size_t k = g.num_experts();
  if (w.size() != k || p.num_experts() != k) throw ArgumentError("exp3ip_pmf: size mismatch");
  if (dominating.empty()) throw ArgumentError("exp3ip_pmf: empty dominating set");

  std::vector<double> f(k, 0.0);
  double f_total = 0.0;
  for (std::size_t i : dominating) {
    f[i] = expected_observations(g, p, i);
    f_total += f[i];
  }
  if (!(f_total > 0.0)) throw InvariantViolation("exp3ip_pmf: dominating set observes nothing");

  std::vector<double> pi = w.normalized();
  for (std::size_t i = 0; i < k; ++i) {
    pi[i] = (1.0 - eta) * pi[i] + (dominating.contains(i) ? eta * f[i] / f_total : 0.0);
  }
  return Pmf(std::move(pi));
}

double exp3ip_observation_prob(const Pmf& pmf, const NominalGraph& g,
                               const EdgeProbabilityTable& p, std::size_t i) {
  const std::size_t k = g.num_experts();
  if (i >= k) throw ArgumentError("exp3ip_observation_prob: index out of range");
  if (pmf.size() != k || p.num_experts() != k) {
    throw ArgumentError("exp3ip_observation_prob: size mismatch");
  }
  double q = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (g.has_edge(j, i)) q += pmf[j] * p(j, i);
  }
  return q;
}

Pmf exp3up_pmf(const WeightVector& w, double eta, const VertexSet& dominating) {
  check_eta(eta, "exp3up_pmf");
  if (dominating.empty()) throw ArgumentError("exp3up_pmf: empty dominating set");
  std::vector<double> pi = w.normalized();
  const double share = eta / static_cast<double>(dominating.size());
  for (std::size_t i = 0; i < pi.size(); ++i) {
    pi[i] = (1.0 - eta) * pi[i] + (dominating.contains(i) ? share : 0.0);
  }
  return Pmf(std::move(pi));
}

std::size_t exploration_index(std::size_t t, std::size_t num_experts, std::size_t M) {
  if (num_experts == 0) throw ArgumentError("exploration_index: K must be positive");
  if (t < 1 || t > num_experts * M) {
    throw ArgumentError("exploration_index: round " + std::to_string(t) +
                        " outside the exploration phase 1.." + std::to_string(num_experts * M));
  }
  return (t - 1) % num_experts;
}

ProbabilityEstimator::ProbabilityEstimator(std::size_t num_experts)
    : k_(num_experts), counts_(num_experts * num_experts, 0), sums_(num_experts * num_experts, 0) {}

double ProbabilityEstimator::estimate(std::size_t i, std::size_t j) const noexcept {
  const std::uint64_t c = count(i, j);
  return c == 0 ? 0.0 : static_cast<double>(sum(i, j)) / static_cast<double>(c);
}

void ProbabilityEstimator::update(std::size_t chosen, const NominalGraph& g,
                                  std::span<const EdgeDraw> draws) {
  if (g.num_experts() != k_ || chosen >= k_) {
    throw ArgumentError("ProbabilityEstimator::update: bad expert or graph");
  }
  std::vector<std::uint8_t> seen(k_, 0);
  for (const EdgeDraw& d : draws) {
    if (d.target >= k_ || !g.has_edge(chosen, d.target)) {
      throw ContractViolation("ProbabilityEstimator::update: draw on non-edge (" +
                              std::to_string(chosen + 1) + "," + std::to_string(d.target + 1) + ")");
    }
    if (seen[d.target]++) throw ContractViolation("ProbabilityEstimator::update: duplicate draw");
  }
  for (std::size_t j = 0; j < k_; ++j) {
    if (g.has_edge(chosen, j) && !seen[j]) {
      throw ContractViolation("ProbabilityEstimator::update: missing draw for out-edge");
    }
  }
  for (const EdgeDraw& d : draws) {
    ++counts_[chosen * k_ + d.target];
    if (d.revealed) ++sums_[chosen * k_ + d.target];
  }
}

ProbabilityEstimator ProbabilityEstimator::from_raw(std::size_t k, std::vector<std::uint64_t> counts,
                                                    std::vector<std::uint64_t> sums) {
  if (counts.size() != k * k || sums.size() != k * k) {
    throw ArgumentError("ProbabilityEstimator: raw state size mismatch");
  }
  for (std::size_t e = 0; e < counts.size(); ++e) {
    if (sums[e] > counts[e]) throw ArgumentError("ProbabilityEstimator: sum exceeds count");
  }
  ProbabilityEstimator est(k);
  est.counts_ = std::move(counts);
  est.sums_ = std::move(sums);
  return est;
}

double exp3up_qhat(const Pmf& pmf, const NominalGraph& g, const ProbabilityEstimator& est,
                   double xi, std::size_t M, std::size_t i) {
  const std::size_t k = g.num_experts();
  if (i >= k) throw ArgumentError("exp3up_qhat: index out of range");
  if (M == 0) throw ArgumentError("exp3up_qhat: M must be positive");
  const double inflation = xi / std::sqrt(static_cast<double>(M));
  double q = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    if (!g.has_edge(j, i)) continue;
    if (est.count(j, i) < M) {
      throw PhaseOrderError("exp3up_qhat: edge (" + std::to_string(j + 1) + "," +
                            std::to_string(i + 1) + ") has " + std::to_string(est.count(j, i)) +
                            " < M samples");
    }
    q += pmf[j] * (est.estimate(j, i) + inflation);
  }
  return q;
}

double exp3up_loss_estimate(double loss, double qhat, bool observed) {
  if (!(qhat > 0.0)) throw InvariantViolation("exp3up_loss_estimate: q-hat <= 0");
  return observed ? loss / qhat : 0.0;
}

ResampleBuffer::ResampleBuffer(std::size_t num_experts, std::size_t capacity)
    : k_(num_experts), capacity_(capacity), edges_(num_experts * num_experts) {}

void ResampleBuffer::set_capacity(std::size_t capacity) {
  capacity_ = capacity;
  for (auto& q : edges_) {
    while (q.size() > capacity_) q.pop_front();
  }
}

void ResampleBuffer::push(std::size_t i, std::size_t j, bool sample) {
  auto& q = edges_[i * k_ + j];
  q.push_back(sample ? 1 : 0);
  while (q.size() > capacity_) q.pop_front();
}

bool ResampleBuffer::full(const NominalGraph& g, std::size_t m) const noexcept {
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      if (g.has_edge(i, j) && samples(i, j).size() < m) return false;
    }
  }
  return true;
}

ResamplingRound::ResamplingRound(const Pmf& pmf, const NominalGraph& g,
                                 const ResampleBuffer& buffers, std::size_t M, Rng& rng)
    : pmf_(pmf), g_(g), buffers_(buffers), m_(M), rng_(rng),
      perms_(g.num_experts() * g.num_experts()) {
  if (M == 0) throw ArgumentError("ResamplingRound: M must be positive");
  if (pmf.size() != g.num_experts() || buffers.num_experts() != g.num_experts()) {
    throw ArgumentError("ResamplingRound: size mismatch");
  }
}

std::uint8_t ResamplingRound::permuted(std::size_t j, std::size_t i, std::size_t u) {
  auto& slot = perms_[j * g_.num_experts() + i];
  if (!slot) {
    const auto& src = buffers_.samples(j, i);
    // Only the newest M samples take part.
    slot.emplace();
    slot->values.assign(src.end() - static_cast<std::ptrdiff_t>(m_), src.end());
  }
  auto& perm = *slot;
  while (perm.fixed <= u) {
    const std::size_t pick = perm.fixed + rng_.below(m_ - perm.fixed);
    std::swap(perm.values[perm.fixed], perm.values[pick]);
    ++perm.fixed;
  }
  return perm.values[u];
}

std::size_t ResamplingRound::count(std::size_t i) {
  const std::size_t k = g_.num_experts();
  if (i >= k) throw ArgumentError("geometric_resample: index out of range");
  for (std::size_t j = 0; j < k; ++j) {
    if (g_.has_edge(j, i) && buffers_.samples(j, i).size() < m_) {
      throw PhaseOrderError("geometric_resample: buffer for edge (" + std::to_string(j + 1) + "," +
                            std::to_string(i + 1) + ") holds fewer than M samples");
    }
  }
  if (trials_.empty()) {
    trials_.reserve(m_);
    for (std::size_t u = 0; u < m_; ++u) trials_.push_back(sample_index(pmf_, rng_));
  }
  for (std::size_t u = 0; u < m_; ++u) {
    const std::size_t j = trials_[u];
    if (g_.has_edge(j, i) && permuted(j, i, u) != 0) return u + 1;
  }
  return m_;
}

std::size_t geometric_resample(std::size_t i, const Pmf& pmf, const NominalGraph& g,
                               const ResampleBuffer& buffers, std::size_t M, Rng& rng) {
  ResamplingRound round(pmf, g, buffers, M, rng);
  return round.count(i);
}

double gr_loss_estimate(double loss, std::size_t Q, std::size_t M, bool observed) {
  if (Q < 1 || Q > M) {
    throw ContractViolation("gr_loss_estimate: Q=" + std::to_string(Q) + " outside [1, M]");
  }
  return observed ? static_cast<double>(Q) * loss : 0.0;
}

}  // namespace graphbandit
