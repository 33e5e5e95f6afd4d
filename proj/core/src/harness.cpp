#include "graphbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "graphbandit/errors.hpp"

namespace graphbandit {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(std::string_view s, std::string_view context) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != str.size()) {
    throw ArgumentError("bad number '" + str + "' in '" + std::string(context) + "'");
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

ProbabilityGenerator parse_probability_generator(std::string_view text) {
  if (text.rfind("equal:", 0) == 0) {
    const double v = parse_real(text.substr(6), text);
    if (!(v > 0.0 && v <= 1.0)) throw ArgumentError("equal:<v> requires 0 < v <= 1");
    return ProbabilityGenerator::equal(v);
  }
  if (text.rfind("uniform:", 0) == 0) {
    const auto body = text.substr(8);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) throw ArgumentError("expected uniform:<lo>,<hi>");
    const double lo = parse_real(body.substr(0, comma), text);
    const double hi = parse_real(body.substr(comma + 1), text);
    if (!(lo > 0.0 && lo <= hi && hi <= 1.0)) {
      throw ArgumentError("uniform:<lo>,<hi> requires 0 < lo <= hi <= 1");
    }
    return ProbabilityGenerator::uniform(lo, hi);
  }
  throw ArgumentError("probability generator must be equal:<v> or uniform:<lo>,<hi>, got '" +
                      std::string(text) + "'");
}

std::size_t ExperimentConfig::effective_horizon() const {
  if (stream) return horizon == 0 ? stream->rounds() : std::min(horizon, stream->rounds());
  return horizon;
}

std::uint64_t ExperimentConfig::run_seed(std::size_t run) const {
  return run < seeds.size() ? seeds[run] : splitmix64(seed + run);
}

LearnerConfig ExperimentConfig::learner_config(Algorithm a) const {
  LearnerConfig lc;
  lc.algorithm = a;
  lc.schedule = schedule;
  lc.M = M;
  lc.xi = xi;
  if (epsilon) {
    lc.epsilon = *epsilon;
  } else if (probabilities.kind == ProbabilityGenerator::Kind::kGraphFile && file_probabilities) {
    lc.epsilon = file_probabilities->epsilon();
  } else {
    lc.epsilon = probabilities.epsilon();
  }
  return lc;
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ArgumentError("experiment: no algorithms selected");
  if (runs == 0) throw ArgumentError("experiment: runs must be at least 1");
  if (checkpoints == 0) throw ArgumentError("experiment: need at least one checkpoint");
  if (effective_horizon() == 0) throw ArgumentError("experiment: horizon must be positive");
  if (probabilities.kind == ProbabilityGenerator::Kind::kUniform &&
      !(probabilities.lo > 0.0 && probabilities.lo <= probabilities.hi && probabilities.hi <= 1.0)) {
    throw ArgumentError("experiment: uniform(lo, hi) requires 0 < lo <= hi <= 1");
  }
  if (probabilities.kind == ProbabilityGenerator::Kind::kGraphFile && !file_probabilities) {
    throw ArgumentError("experiment: graph-file probabilities requested but none loaded");
  }
  const std::size_t k = graph.num_experts();
  if (stream) {
    if (stream->num_experts() != k) {
      throw ArgumentError("experiment: graph has " + std::to_string(k) + " experts but the pool has " +
                          std::to_string(stream->num_experts()));
    }
  } else {
    if (adversary.num_experts != k) {
      throw ArgumentError("experiment: adversary and graph disagree on K");
    }
  }
  for (Algorithm a : algorithms) {
    if (a == Algorithm::kExp3Ip && mode == ProbabilityMode::kUninformative) {
      throw ArgumentError("experiment: exp3-ip needs --informative");
    }
    learner_config(a).validate();
  }
}

std::vector<double> Series::final_per_run() const {
  std::vector<double> out;
  out.reserve(per_run.size());
  for (const auto& r : per_run) out.push_back(r.back());
  return out;
}

const Series& AggregateResult::find(Algorithm a, std::string_view metric) const {
  for (const Series& s : series) {
    if (s.algorithm == a && s.metric == metric) return s;
  }
  throw ArgumentError("result has no " + std::string(metric) + " series for " +
                      std::string(to_string(a)));
}

std::vector<std::size_t> checkpoint_rounds(std::size_t horizon, std::size_t count) {
  std::vector<std::size_t> out;
  if (horizon == 0) return out;
  const std::size_t step = (horizon + count - 1) / count;
  for (std::size_t t = step; t < horizon; t += step) out.push_back(t);
  out.push_back(horizon);
  return out;
}

double running_mse(const std::vector<std::vector<double>>& predictions,
                   std::span<const double> truths, std::size_t t) {
  if (predictions.empty()) throw ArgumentError("running_mse: no runs");
  if (t == 0 || t > truths.size()) throw ArgumentError("running_mse: t outside the sequence");
  double total = 0.0;
  for (const auto& run : predictions) {
    if (run.size() < t) throw ArgumentError("running_mse: prediction sequence shorter than t");
    double s = 0.0;
    for (std::size_t tau = 0; tau < t; ++tau) {
      const double e = run[tau] - truths[tau];
      s += e * e;
    }
    total += s / static_cast<double>(t);
  }
  return total / static_cast<double>(predictions.size());
}

void summarize(Series& s) {
  const std::size_t runs = s.per_run.size();
  const std::size_t points = runs == 0 ? 0 : s.per_run.front().size();
  s.mean.assign(points, 0.0);
  s.std.assign(points, 0.0);
  for (std::size_t c = 0; c < points; ++c) {
    double m = 0.0;
    for (const auto& r : s.per_run) m += r[c];
    m /= static_cast<double>(runs);
    double var = 0.0;
    for (const auto& r : s.per_run) var += (r[c] - m) * (r[c] - m);
    s.mean[c] = m;
    s.std[c] = runs > 1 ? std::sqrt(var / static_cast<double>(runs - 1)) : 0.0;
  }
}

std::size_t default_thread_count() {
  std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GRAPHBANDIT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

AggregateResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t horizon = cfg.effective_horizon();
  const std::size_t k = cfg.graph.num_experts();
  const std::size_t n_algos = cfg.algorithms.size();

  AggregateResult result;
  result.checkpoints = checkpoint_rounds(horizon, cfg.checkpoints);
  const auto& cps = result.checkpoints;

  // Per-run inputs shared by every algorithm of that run.
  std::vector<LossTable> losses(cfg.runs);
  for (std::size_t n = 0; n < cfg.runs; ++n) {
    const std::uint64_t seed = cfg.run_seed(n);
    result.run_seeds.push_back(seed);
    Rng prob_rng(derive_seed(seed, streams::kProbabilities));
    switch (cfg.probabilities.kind) {
      case ProbabilityGenerator::Kind::kEqual:
        result.probability_tables.push_back(EdgeProbabilityTable::equal(cfg.graph, cfg.probabilities.lo));
        break;
      case ProbabilityGenerator::Kind::kUniform:
        result.probability_tables.push_back(EdgeProbabilityTable::uniform(
            cfg.graph, cfg.probabilities.lo, cfg.probabilities.hi, prob_rng));
        break;
      case ProbabilityGenerator::Kind::kGraphFile:
        result.probability_tables.push_back(*cfg.file_probabilities);
        break;
    }
    if (cfg.stream) {
      if (n == 0) {
        const LossTable full = cfg.stream->losses();
        const auto v = full.values();
        losses[0] = LossTable(horizon, k, std::vector<double>(v.begin(), v.begin() + horizon * k));
      } else {
        losses[n] = losses[0];
      }
    } else {
      Rng adv(derive_seed(seed, streams::kAdversary));
      losses[n] = generate_losses(cfg.adversary, horizon, adv);
    }
  }

  const bool dataset = cfg.dataset_mode();
  // metric slots: regret always, mse in dataset mode
  const std::size_t n_metrics = dataset ? 2 : 1;
  std::vector<Series> series(n_algos * n_metrics);
  for (std::size_t a = 0; a < n_algos; ++a) {
    for (std::size_t m = 0; m < n_metrics; ++m) {
      Series& s = series[a * n_metrics + m];
      s.algorithm = cfg.algorithms[a];
      s.metric = m == 0 ? std::string(dataset ? metrics::kMse : metrics::kRegret)
                        : std::string(metrics::kRegret);
      s.per_run.assign(cfg.runs, std::vector<double>(cps.size(), 0.0));
    }
  }
  result.loss_hashes.assign(cfg.runs, std::vector<std::uint64_t>(n_algos, 0));

  const std::size_t jobs = cfg.runs * n_algos;
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<RunFailure> failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t n = job / n_algos;
      const std::size_t a = job % n_algos;
      const Algorithm algo = cfg.algorithms[a];
      try {
        const FeedbackModel model = FeedbackModel::fixed(cfg.graph, result.probability_tables[n]);
        const RunTrace trace =
            run_episode(cfg.learner_config(algo), losses[n], model,
                        cfg.mode == ProbabilityMode::kInformative, result.run_seeds[n]);
        result.loss_hashes[n][a] = losses[n].hash();
        const std::vector<double> regret = regret_curve(trace, losses[n]);
        if (dataset) {
          auto& mse = series[a * n_metrics].per_run[n];
          auto& reg = series[a * n_metrics + 1].per_run[n];
          double sq = 0.0;
          std::size_t c = 0;
          for (std::size_t t = 1; t <= horizon; ++t) {
            const double e = cfg.stream->predictions(static_cast<Eigen::Index>(t - 1),
                                                     static_cast<Eigen::Index>(trace.chosen[t - 1])) -
                             cfg.stream->targets[t - 1];
            sq += e * e;
            if (c < cps.size() && cps[c] == t) {
              mse[c] = sq / static_cast<double>(t);
              reg[c] = regret[t - 1];
              ++c;
            }
          }
        } else {
          auto& reg = series[a].per_run[n];
          for (std::size_t c = 0; c < cps.size(); ++c) reg[c] = regret[cps[c] - 1];
        }
      } catch (const std::exception& e) {
        const bool config = dynamic_cast<const std::invalid_argument*>(&e) != nullptr ||
                            dynamic_cast<const IngestionError*>(&e) != nullptr;
        std::lock_guard lock(err_mu);
        if (!failure) {
          failure.emplace("run " + std::to_string(n + 1) + " (seed " +
                              std::to_string(result.run_seeds[n]) + "), " +
                              std::string(to_string(algo)) + ": " + e.what(),
                          config);
        }
        next.store(jobs);
      }
    }
  };

  const std::size_t threads =
      std::max<std::size_t>(1, std::min(jobs, cfg.threads ? cfg.threads : default_thread_count()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) throw *failure;

  for (Series& s : series) summarize(s);
  result.series = std::move(series);
  return result;
}

void emit_results(const AggregateResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "results.csv");
    out << "t,algorithm,metric,mean,std\n";
    for (const Series& s : result.series) {
      for (std::size_t c = 0; c < result.checkpoints.size() && c < s.mean.size(); ++c) {
        out << result.checkpoints[c] << ',' << to_string(s.algorithm) << ',' << s.metric << ','
            << fmt_double(s.mean[c]) << ',' << fmt_double(s.std[c]) << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "summary.csv");
    out << "algorithm,metric,runs,mean,std\n";
    for (const Series& s : result.series) {
      if (s.mean.empty()) continue;
      out << to_string(s.algorithm) << ',' << s.metric << ',' << s.per_run.size() << ','
          << fmt_double(s.mean.back()) << ',' << fmt_double(s.std.back()) << '\n';
    }
  }
  {
    auto out = open_out(dir / "runs.csv");
    out << "run,seed,algorithm,metric,final\n";
    for (const Series& s : result.series) {
      for (std::size_t n = 0; n < s.per_run.size(); ++n) {
        if (s.per_run[n].empty()) continue;
        out << n + 1 << ',' << (n < result.run_seeds.size() ? result.run_seeds[n] : 0) << ','
            << to_string(s.algorithm) << ',' << s.metric << ',' << fmt_double(s.per_run[n].back())
            << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "probabilities.csv");
    out << "run,i,j,p\n";
    for (std::size_t n = 0; n < result.probability_tables.size(); ++n) {
      const auto& p = result.probability_tables[n];
      for (std::size_t i = 0; i < p.num_experts(); ++i) {
        for (std::size_t j = 0; j < p.num_experts(); ++j) {
          if (p(i, j) > 0.0) out << n + 1 << ',' << i + 1 << ',' << j + 1 << ',' << fmt_double(p(i, j)) << '\n';
        }
      }
    }
  }
}

}  // namespace graphbandit
