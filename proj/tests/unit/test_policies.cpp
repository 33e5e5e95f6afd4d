#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "graphbandit/errors.hpp"
#include "graphbandit/oracles.hpp"
#include "graphbandit/policies.hpp"

namespace gb = graphbandit;
using gb::NominalGraph;
using gb::VertexSet;

namespace {

gb::WeightVector uniform_w(std::size_t k) { return gb::WeightVector::uniform(k); }

void expect_valid_pmf(const gb::Pmf& p) {
  double s = 0.0;
  for (double v : p.values()) {
    ASSERT_GE(v, 0.0);
    s += v;
  }
  ASSERT_NEAR(s, 1.0, gb::Pmf::kTolerance);
}

NominalGraph random_graph(gb::Rng& rng, std::size_t k) {
  const double density = rng.uniform();
  std::vector<std::uint8_t> adj(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) adj[i * k + j] = (i == j) || rng.bernoulli(density);
  }
  return NominalGraph(k, adj);
}

gb::ResampleBuffer filled(const NominalGraph& g, std::size_t m, bool value) {
  gb::ResampleBuffer b(g.num_experts(), m);
  for (std::size_t i = 0; i < g.num_experts(); ++i) {
    for (std::size_t j = 0; j < g.num_experts(); ++j) {
      if (!g.has_edge(i, j)) continue;
      for (std::size_t u = 0; u < m; ++u) b.push(i, j, value);
    }
  }
  return b;
}

}  // namespace

TEST(Exp3IpPmf, Examples) {
  const auto k3 = NominalGraph::complete(3);
  const auto p3 = gb::EdgeProbabilityTable::equal(k3, 0.4);
  const auto u = gb::exp3ip_pmf(uniform_w(3), 0.0, k3, p3, VertexSet{0});
  for (double v : u.values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);

  const auto k2 = NominalGraph::complete(2);
  const auto p2 = gb::EdgeProbabilityTable::equal(k2, 0.5);
  const auto all = gb::exp3ip_pmf(uniform_w(2), 1.0, k2, p2, VertexSet{0});
  EXPECT_EQ(all[0], 1.0);
  EXPECT_EQ(all[1], 0.0);

  EXPECT_DOUBLE_EQ(gb::expected_observations(k2, p2, 0), 1.0);
  const auto half = gb::exp3ip_pmf(uniform_w(2), 0.5, k2, p2, VertexSet{0});
  EXPECT_NEAR(half[0], 0.75, 1e-15);
  EXPECT_NEAR(half[1], 0.25, 1e-15);
}

TEST(Exp3IpPmf, ExplorationProportionalToObservations) {
  // D = {0, 1}; F_0 = 1 + 0.5, F_1 = 0.5 -> exploration split 3:1
  const auto g = NominalGraph::with_edges(3, std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}});
  const gb::EdgeProbabilityTable p(g, {1.0, 0, 0.5, 0, 0.5, 0, 0, 0, 0.5}, 0.5);
  const auto pmf = gb::exp3ip_pmf(uniform_w(3), 1.0, g, p, VertexSet{0, 1});
  EXPECT_NEAR(pmf[0], 0.75, 1e-15);
  EXPECT_NEAR(pmf[1], 0.25, 1e-15);
  EXPECT_EQ(pmf[2], 0.0);
}

TEST(Exp3IpObservationProb, Examples) {
  const auto b = NominalGraph::bandit(3);
  const auto pb = gb::EdgeProbabilityTable::equal(b, 1.0);
  const gb::Pmf pi({0.2, 0.3, 0.5});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(gb::exp3ip_observation_prob(pi, b, pb, i), pi[i]);

  const auto k2 = NominalGraph::complete(2);
  const auto p2 = gb::EdgeProbabilityTable::equal(k2, 0.5);
  EXPECT_NEAR(gb::exp3ip_observation_prob(gb::Pmf({0.75, 0.25}), k2, p2, 0), 0.5, 1e-15);

  const auto k4 = NominalGraph::complete(4);
  const auto p1 = gb::EdgeProbabilityTable::equal(k4, 1.0);
  const gb::Pmf pi4({0.1, 0.2, 0.3, 0.4});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(gb::exp3ip_observation_prob(pi4, k4, p1, i), 1.0, 1e-15);
}

TEST(Exp3UpPmf, Examples) {
  const auto w = gb::WeightVector::from_linear(std::vector<double>{3.0, 1.0});
  const auto exploit = gb::exp3up_pmf(w, 0.0, VertexSet{0, 1});
  EXPECT_NEAR(exploit[0], 0.75, 1e-15);
  const auto explore = gb::exp3up_pmf(uniform_w(3), 1.0, VertexSet{1});
  EXPECT_EQ(explore[0], 0.0);
  EXPECT_EQ(explore[1], 1.0);
  EXPECT_EQ(explore[2], 0.0);
  const auto mix = gb::exp3up_pmf(w, 0.5, VertexSet{0, 1});
  EXPECT_NEAR(mix[0], 0.625, 1e-15);
  EXPECT_NEAR(mix[1], 0.375, 1e-15);
  EXPECT_THROW(gb::exp3up_pmf(w, 0.5, VertexSet{}), gb::ArgumentError);
}

TEST(Pmfs, ValidOnRandomStates) {
  gb::Rng rng(41);
  for (int n = 0; n < 10000; ++n) {
    const std::size_t k = 1 + rng.below(10);
    const auto g = random_graph(rng, k);
    const auto p = gb::EdgeProbabilityTable::uniform(g, 0.05 + 0.5 * rng.uniform(), 1.0, rng);
    std::vector<double> lw(k);
    for (auto& x : lw) x = -50.0 * rng.uniform();
    const auto w = gb::WeightVector::from_log(lw);
    const double eta = rng.uniform();
    const auto d = gb::greedy_dominating_set(g);
    expect_valid_pmf(gb::exp3ip_pmf(w, eta, g, p, d));
    expect_valid_pmf(gb::exp3up_pmf(w, eta, d));
    expect_valid_pmf(gb::exp3ip_pmf(w, eta, g, gb::EdgeProbabilityTable::equal(g, 1.0), d));
  }
}

// A positive rescaling of w is an additive shift in log space. Dyadic values
// keep that shift exact in floating point, so the pmf must match bit for bit.
TEST(Pmfs, InvariantUnderWeightScaling) {
  gb::Rng rng(43);
  for (int n = 0; n < 2000; ++n) {
    const std::size_t k = 2 + rng.below(8);
    const auto g = random_graph(rng, k);
    const auto p = gb::EdgeProbabilityTable::uniform(g, 0.25, 0.5, rng);
    std::vector<double> lw(k), shifted(k);
    const double shift = (static_cast<double>(rng.below(2'000'000)) - 1'000'000.0) / 1024.0;
    for (std::size_t i = 0; i < k; ++i) {
      lw[i] = -static_cast<double>(rng.below(40 * 1024)) / 1024.0;
      shifted[i] = lw[i] + shift;
    }
    const auto a = gb::WeightVector::from_log(lw);
    const auto b = gb::WeightVector::from_log(shifted);
    const double eta = rng.uniform();
    const auto d = gb::greedy_dominating_set(g);
    ASSERT_EQ(gb::exp3ip_pmf(a, eta, g, p, d), gb::exp3ip_pmf(b, eta, g, p, d));
    ASSERT_EQ(gb::exp3up_pmf(a, eta, d), gb::exp3up_pmf(b, eta, d));
  }
}

TEST(Pmfs, LinearScalingAgreesClosely) {
  const std::vector<double> w{0.3, 1.7, 2.2};
  std::vector<double> scaled;
  for (double x : w) scaled.push_back(x * 1e-200);
  const auto a = gb::exp3up_pmf(gb::WeightVector::from_linear(w), 0.2, VertexSet{0});
  const auto b = gb::exp3up_pmf(gb::WeightVector::from_linear(scaled), 0.2, VertexSet{0});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
}

TEST(ExplorationIndex, Examples) {
  EXPECT_EQ(gb::exploration_index(1, 4, 2), 0u);
  EXPECT_EQ(gb::exploration_index(4, 4, 2), 3u);
  EXPECT_EQ(gb::exploration_index(5, 4, 2), 0u);
  EXPECT_THROW(gb::exploration_index(0, 4, 2), gb::ArgumentError);
  EXPECT_THROW(gb::exploration_index(9, 4, 2), gb::ArgumentError);
}

TEST(ExplorationIndex, EachExpertExactlyMTimes) {
  for (std::size_t k = 1; k <= 7; ++k) {
    for (std::size_t m = 1; m <= 5; ++m) {
      std::vector<std::size_t> c(k, 0);
      for (std::size_t t = 1; t <= k * m; ++t) ++c[gb::exploration_index(t, k, m)];
      for (auto v : c) ASSERT_EQ(v, m);
    }
  }
}

TEST(ProbabilityEstimator, Examples) {
  const auto g = NominalGraph::complete(2);
  gb::ProbabilityEstimator est(2);
  est.update(0, g, std::vector<gb::EdgeDraw>{{0, false}, {1, true}});
  EXPECT_EQ(est.count(0, 1), 1u);
  EXPECT_EQ(est.estimate(0, 1), 1.0);
  EXPECT_EQ(est.estimate(1, 0), 0.0);  // never sampled

  for (bool x : {false, true, true}) est.update(0, g, std::vector<gb::EdgeDraw>{{0, false}, {1, x}});
  EXPECT_EQ(est.count(0, 1), 4u);
  EXPECT_DOUBLE_EQ(est.estimate(0, 1), 0.75);
}

TEST(ProbabilityEstimator, ConvergesToP) {
  const auto g = NominalGraph::bandit(1);
  gb::ProbabilityEstimator est(1);
  gb::Rng rng(47);
  for (int i = 0; i < 10000; ++i) est.update(0, g, std::vector<gb::EdgeDraw>{{0, rng.bernoulli(0.3)}});
  EXPECT_GE(est.estimate(0, 0), 0.28);
  EXPECT_LE(est.estimate(0, 0), 0.32);
}

TEST(ProbabilityEstimator, ContractViolations) {
  const auto g = NominalGraph::bandit(2);
  gb::ProbabilityEstimator est(2);
  EXPECT_THROW(est.update(0, g, std::vector<gb::EdgeDraw>{{0, true}, {1, true}}), gb::ContractViolation);
  EXPECT_THROW(est.update(0, g, std::vector<gb::EdgeDraw>{}), gb::ContractViolation);
  EXPECT_THROW(est.update(0, g, std::vector<gb::EdgeDraw>{{0, true}, {0, true}}), gb::ContractViolation);
  EXPECT_THROW(gb::ProbabilityEstimator::from_raw(2, {1, 0, 0, 1}, {2, 0, 0, 0}), gb::ArgumentError);
}

TEST(Exp3UpQhat, Examples) {
  const auto g = NominalGraph::complete(2);
  // p-hat into expert 0: from 0 is 10/25 = 0.4, from 1 is 15/25 = 0.6
  const auto est = gb::ProbabilityEstimator::from_raw(2, {25, 25, 25, 25}, {10, 0, 15, 0});
  EXPECT_NEAR(gb::exp3up_qhat(gb::Pmf({0.5, 0.5}), g, est, 1.0, 25, 0), 0.7, 1e-15);

  const auto b = NominalGraph::bandit(3);
  const auto ones = gb::ProbabilityEstimator::from_raw(3, {25, 0, 0, 0, 25, 0, 0, 0, 25},
                                                        {25, 0, 0, 0, 25, 0, 0, 0, 25});
  const gb::Pmf pi({0.2, 0.3, 0.5});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(gb::exp3up_qhat(pi, b, ones, 1.0, 25, i), 1.2 * pi[i], 1e-15);

  const auto zeros = gb::ProbabilityEstimator::from_raw(2, {25, 25, 25, 25}, {0, 0, 0, 0});
  EXPECT_NEAR(gb::exp3up_qhat(gb::Pmf({0.5, 0.5}), g, zeros, 2.0, 16, 1), 0.5, 1e-15);
}

TEST(Exp3UpQhat, PhaseOrder) {
  const auto g = NominalGraph::complete(2);
  const auto est = gb::ProbabilityEstimator::from_raw(2, {25, 25, 24, 25}, {0, 0, 0, 0});
  EXPECT_THROW(gb::exp3up_qhat(gb::Pmf({0.5, 0.5}), g, est, 1.0, 25, 0), gb::PhaseOrderError);
  EXPECT_NO_THROW(gb::exp3up_qhat(gb::Pmf({0.5, 0.5}), g, est, 1.0, 25, 1));
}

// Whenever every in-edge estimate is within xi/sqrt(M) of the truth,
// q-hat must dominate q. Checked exactly on random instances.
TEST(Exp3UpQhat, DominatesQWhenEstimatesAreClose) {
  gb::Rng rng(53);
  std::size_t checked = 0;
  for (int n = 0; n < 5000; ++n) {
    const std::size_t k = 1 + rng.below(6);
    const auto g = random_graph(rng, k);
    const auto p = gb::EdgeProbabilityTable::uniform(g, 0.05, 1.0, rng);
    const std::size_t m = 1 + rng.below(100);
    const double xi = 1.0 + 2.0 * rng.uniform();
    const double width = xi / std::sqrt(static_cast<double>(m));
    std::vector<std::uint64_t> counts(k * k, 0), sums(k * k, 0);
    bool close = true;
    for (std::size_t e = 0; e < k * k; ++e) {
      if (!g.has_edge(e / k, e % k)) continue;
      counts[e] = m + rng.below(50);
      // draw a sample sum near the truth, occasionally far from it
      const double target = p(e / k, e % k) + (rng.uniform() - 0.5) * 2.4 * width;
      const double clipped = std::min(1.0, std::max(0.0, target));
      sums[e] = static_cast<std::uint64_t>(std::llround(clipped * static_cast<double>(counts[e])));
      const double phat = static_cast<double>(sums[e]) / static_cast<double>(counts[e]);
      close = close && std::abs(phat - p(e / k, e % k)) <= width;
    }
    const auto est = gb::ProbabilityEstimator::from_raw(k, counts, sums);
    std::vector<double> raw(k);
    double total = 0.0;
    for (auto& v : raw) total += (v = rng.uniform() + 1e-3);
    for (auto& v : raw) v /= total;
    const gb::Pmf pi(raw);
    if (!close) continue;
    ++checked;
    for (std::size_t i = 0; i < k; ++i) {
      ASSERT_GE(gb::exp3up_qhat(pi, g, est, xi, m, i), gb::exp3ip_observation_prob(pi, g, p, i));
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Exp3UpLossEstimate, Examples) {
  EXPECT_DOUBLE_EQ(gb::exp3up_loss_estimate(0.7, 0.7, true), 1.0);
  EXPECT_EQ(gb::exp3up_loss_estimate(0.7, 0.7, false), 0.0);
  EXPECT_EQ(gb::exp3up_loss_estimate(0.0, 0.3, true), 0.0);
  EXPECT_THROW(gb::exp3up_loss_estimate(0.5, 0.0, true), gb::InvariantViolation);
}

TEST(ResampleBuffer, KeepsLastCapacitySamples) {
  gb::ResampleBuffer b(1, 3);
  for (bool x : {true, true, false, false, true}) b.push(0, 0, x);
  EXPECT_EQ(b.samples(0, 0), (std::deque<std::uint8_t>{0, 0, 1}));
  b.set_capacity(5);
  b.push(0, 0, true);
  EXPECT_EQ(b.samples(0, 0).size(), 4u);
  b.set_capacity(2);
  EXPECT_EQ(b.samples(0, 0), (std::deque<std::uint8_t>{1, 1}));
  EXPECT_TRUE(b.full(NominalGraph::bandit(1), 2));
  EXPECT_FALSE(b.full(NominalGraph::bandit(1), 3));
}

TEST(GeometricResample, DegenerateBuffers) {
  const auto g = NominalGraph::complete(3);
  const gb::Pmf pi({0.2, 0.3, 0.5});
  gb::Rng rng(59);
  const auto ones = filled(g, 7, true);
  const auto zeros = filled(g, 7, false);
  for (int n = 0; n < 50; ++n) {
    EXPECT_EQ(gb::geometric_resample(1, pi, g, ones, 7, rng), 1u);
    EXPECT_EQ(gb::geometric_resample(1, pi, g, zeros, 7, rng), 7u);
  }
}

TEST(GeometricResample, Underfull) {
  const auto g = NominalGraph::complete(2);
  auto b = filled(g, 4, true);
  gb::Rng rng(61);
  EXPECT_THROW(gb::geometric_resample(0, gb::Pmf({0.5, 0.5}), g, b, 5, rng), gb::PhaseOrderError);
}

TEST(GeometricResample, TwoTrialExpectation) {
  // q = 0.5, M = 2: E[Q] = 1*0.5 + 2*0.5 = 1.5
  const auto r = gb::gr_resampling(0.5, 2, 1.0, 1'000'000, 67);
  EXPECT_EQ(r.q_count.expected, 1.5);
  EXPECT_LE(std::abs(r.q_count.mean - 1.5), 4.0 * r.q_count.std_error);
  EXPECT_LE(std::abs(r.loss_estimate.mean - 0.75), 4.0 * r.loss_estimate.std_error);
}

TEST(GeometricResample, SharedTrialsAcrossExperts) {
  // one round, several queries: every answer lies in [1, M]
  const auto g = NominalGraph::complete(4);
  gb::Rng fill(71);
  gb::ResampleBuffer b(4, 10);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (int u = 0; u < 10; ++u) b.push(i, j, fill.bernoulli(0.3));
  gb::Rng rng(73);
  gb::ResamplingRound round(gb::Pmf({0.1, 0.2, 0.3, 0.4}), g, b, 10, rng);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto q = round.count(i);
    EXPECT_GE(q, 1u);
    EXPECT_LE(q, 10u);
  }
}

TEST(GrLossEstimate, Examples) {
  EXPECT_DOUBLE_EQ(gb::gr_loss_estimate(0.5, 3, 5, true), 1.5);
  EXPECT_EQ(gb::gr_loss_estimate(0.5, 3, 5, false), 0.0);
  EXPECT_EQ(gb::gr_loss_estimate(1.0, 1, 5, true), 1.0);
  EXPECT_THROW(gb::gr_loss_estimate(1.0, 0, 5, true), gb::ContractViolation);
  EXPECT_THROW(gb::gr_loss_estimate(1.0, 6, 5, true), gb::ContractViolation);
}
