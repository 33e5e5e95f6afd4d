#include <benchmark/benchmark.h>

#include <vector>

#include "graphbandit/environment.hpp"
#include "graphbandit/learner.hpp"
#include "graphbandit/policies.hpp"

namespace gb = graphbandit;

namespace {

gb::WeightVector random_weights(std::size_t k, gb::Rng& rng) {
  std::vector<double> lw(k);
  for (auto& v : lw) v = -5.0 * rng.uniform();
  return gb::WeightVector::from_log(lw);
}

void BM_Exp3IpPmf(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  gb::Rng rng(1);
  const auto g = gb::NominalGraph::complete(k);
  const auto p = gb::EdgeProbabilityTable::uniform(g, 0.25, 0.5, rng);
  const auto d = gb::greedy_dominating_set(g);
  const auto w = random_weights(k, rng);
  for (auto _ : state) {
    auto pmf = gb::exp3ip_pmf(w, 0.1, g, p, d);
    double q = 0.0;
    for (std::size_t i = 0; i < k; ++i) q += gb::exp3ip_observation_prob(pmf, g, p, i);
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(BM_Exp3IpPmf)->Arg(9)->Arg(32)->Arg(128);

void BM_WeightUpdate(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  gb::Rng rng(2);
  auto w = random_weights(k, rng);
  std::vector<double> est(k);
  for (auto& e : est) e = rng.uniform();
  for (auto _ : state) {
    w = gb::exp_weight_update(w, 1e-3, est);
    benchmark::DoNotOptimize(w.normalized());
  }
}
BENCHMARK(BM_WeightUpdate)->Arg(9)->Arg(128)->Arg(1024);

void BM_GeometricResample(benchmark::State& state) {
  const std::size_t k = 9;
  const auto m = static_cast<std::size_t>(state.range(0));
  gb::Rng rng(3);
  const auto g = gb::NominalGraph::complete(k);
  gb::ResampleBuffer buf(k, m);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t u = 0; u < m; ++u) buf.push(i, j, rng.bernoulli(0.25));
  const auto pmf = gb::exp3up_pmf(random_weights(k, rng), 0.1, gb::greedy_dominating_set(g));
  for (auto _ : state) {
    gb::ResamplingRound round(pmf, g, buf, m, rng);
    std::size_t total = 0;
    for (std::size_t i = 0; i < k; ++i) total += round.count(i);
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_GeometricResample)->Arg(25)->Arg(200);

void BM_LearnerRound(benchmark::State& state) {
  const auto algo = static_cast<gb::Algorithm>(state.range(0));
  const std::size_t k = 9;
  const auto g = gb::NominalGraph::complete(k);
  const auto p = gb::EdgeProbabilityTable::equal(g, 0.25);
  gb::LearnerConfig c;
  c.algorithm = algo;
  c.M = 25;
  gb::Learner learner(c, g, 4);
  gb::Rng env(5);
  std::vector<double> loss(k);
  std::size_t t = 0;
  for (auto _ : state) {
    ++t;
    for (auto& l : loss) l = env.uniform();
    const auto ch = learner.select(t, g, &p);
    learner.update(gb::realize_feedback(g, p, ch, loss, env, t));
  }
  state.SetLabel(std::string(gb::to_string(algo)));
}
BENCHMARK(BM_LearnerRound)
    ->Arg(static_cast<int>(gb::Algorithm::kExp3))
    ->Arg(static_cast<int>(gb::Algorithm::kExp3Dom))
    ->Arg(static_cast<int>(gb::Algorithm::kExp3Ip))
    ->Arg(static_cast<int>(gb::Algorithm::kExp3Up))
    ->Arg(static_cast<int>(gb::Algorithm::kExp3Gr));

}  // namespace

BENCHMARK_MAIN();
