#include "graphbandit/environment.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace graphbandit {

LossTable::LossTable(std::size_t rounds, std::size_t num_experts, std::vector<double> values)
    : rounds_(rounds), k_(num_experts), values_(std::move(values)) {
  if (values_.size() != rounds_ * k_) throw ArgumentError("LossTable: values must be T*K");
  for (std::size_t e = 0; e < values_.size(); ++e) {
    const double v = values_[e];
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream os;
      os << "LossTable: loss " << v << " at round " << e / k_ + 1 << ", expert " << e % k_ + 1
         << " outside [0, 1]";
      throw ContractViolation(os.str());
    }
  }
}

std::uint64_t LossTable::hash() const noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix = [&](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  mix(rounds_);
  mix(k_);
  for (double v : values_) mix(std::bit_cast<std::uint64_t>(v));
  return h;
}

AdversarySpec AdversarySpec::fixed_table(LossTable t) {
  AdversarySpec s;
  s.kind = AdversaryKind::kFixedTable;
  s.num_experts = t.num_experts();
  s.table = std::move(t);
  return s;
}

AdversarySpec AdversarySpec::dataset(LossTable t) {
  AdversarySpec s = fixed_table(std::move(t));
  s.kind = AdversaryKind::kDataset;
  return s;
}

AdversarySpec AdversarySpec::stochastic_gap(std::size_t k, double gap, std::optional<std::size_t> best) {
  AdversarySpec s;
  s.kind = AdversaryKind::kStochasticGap;
  s.num_experts = k;
  s.gap = gap;
  s.best = best;
  return s;
}

AdversarySpec AdversarySpec::switching(std::size_t k, double gap, std::size_t period) {
  AdversarySpec s;
  s.kind = AdversaryKind::kSwitching;
  s.num_experts = k;
  s.gap = gap;
  s.period = period;
  return s;
}

LossTable generate_losses(const AdversarySpec& spec, std::size_t horizon, Rng& rng) {
  const std::size_t k = spec.num_experts;
  if (k == 0) throw ArgumentError("adversary: K must be positive");
  switch (spec.kind) {
    case AdversaryKind::kFixedTable:
    case AdversaryKind::kDataset: {
      if (horizon > spec.table.rounds()) {
        throw ArgumentError("adversary: horizon " + std::to_string(horizon) + " exceeds the " +
                            std::to_string(spec.table.rounds()) + "-row loss table");
      }
      const auto v = spec.table.values();
      return LossTable(horizon, k, std::vector<double>(v.begin(), v.begin() + horizon * k));
    }
    case AdversaryKind::kStochasticGap:
    case AdversaryKind::kSwitching: {
      if (!(spec.gap >= 0.0 && spec.gap <= 0.5)) throw ArgumentError("adversary: gap must lie in [0, 0.5]");
      if (spec.kind == AdversaryKind::kSwitching && spec.period == 0) {
        throw ArgumentError("adversary: switching period must be positive");
      }
      std::size_t first_best = 0;
      if (spec.best) {
        if (*spec.best >= k) throw ArgumentError("adversary: best arm out of range");
        first_best = *spec.best;
      } else {
        first_best = static_cast<std::size_t>(rng.below(k));
      }
      std::vector<double> values(horizon * k);
      for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t best = spec.kind == AdversaryKind::kSwitching
                                     ? (first_best + t / spec.period) % k
                                     : first_best;
        for (std::size_t i = 0; i < k; ++i) {
          const double mean = i == best ? 0.5 - spec.gap : 0.5;
          values[t * k + i] = rng.bernoulli(mean) ? 1.0 : 0.0;
        }
      }
      return LossTable(horizon, k, std::move(values));
    }
  }
  throw ArgumentError("adversary: unknown kind");
}

LossTable load_loss_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open loss table " + path.string());
  std::vector<double> values;
  std::size_t k = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    std::vector<double> parsed;
    bool numeric = true;
    for (const auto& cell : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        numeric = false;
        break;
      }
      parsed.push_back(v);
    }
    if (!numeric) {
      if (rows == 0 && k == 0) {
        k = cells.size();  // header
        continue;
      }
      throw IngestionError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell");
    }
    if (k == 0) k = parsed.size();
    if (parsed.size() != k) {
      throw IngestionError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(k) + " columns, found " + std::to_string(parsed.size()));
    }
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      if (!(parsed[i] >= 0.0 && parsed[i] <= 1.0)) {
        throw IngestionError(path.string() + ":" + std::to_string(line_no) + ": column " +
                             std::to_string(i + 1) + " loss outside [0, 1]");
      }
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) throw IngestionError(path.string() + ": no loss rows");
  return LossTable(rows, k, std::move(values));
}

FeedbackModel::FeedbackModel(std::vector<std::pair<NominalGraph, EdgeProbabilityTable>> steps)
    : steps_(std::move(steps)) {
  if (steps_.empty()) throw ArgumentError("FeedbackModel: need at least one graph");
  const std::size_t k = steps_.front().first.num_experts();
  for (const auto& [g, p] : steps_) {
    if (g.num_experts() != k || p.num_experts() != k) {
      throw ArgumentError("FeedbackModel: every graph must have the same K");
    }
  }
}

FeedbackModel FeedbackModel::fixed(NominalGraph g, EdgeProbabilityTable p) {
  std::vector<std::pair<NominalGraph, EdgeProbabilityTable>> steps;
  steps.emplace_back(std::move(g), std::move(p));
  return FeedbackModel(std::move(steps));
}

FeedbackModel FeedbackModel::cycling(std::vector<std::pair<NominalGraph, EdgeProbabilityTable>> steps) {
  return FeedbackModel(std::move(steps));
}

FeedbackEvent realize_feedback(const NominalGraph& g, const EdgeProbabilityTable& p,
                               std::size_t chosen, std::span<const double> losses, Rng& rng,
                               std::size_t round) {
  const std::size_t k = g.num_experts();
  if (chosen >= k) throw ArgumentError("realize_feedback: chosen expert out of range");
  if (losses.size() != k || p.num_experts() != k) throw ArgumentError("realize_feedback: size mismatch");
  for (double l : losses) {
    if (!(l >= 0.0 && l <= 1.0)) throw ContractViolation("realize_feedback: loss outside [0, 1]");
  }
  FeedbackEvent fb;
  fb.round = round;
  fb.chosen = chosen;
  fb.incurred_loss = losses[chosen];
  for (std::size_t j = 0; j < k; ++j) {
    if (!g.has_edge(chosen, j)) continue;
    if (rng.bernoulli(p(chosen, j))) fb.observed.push_back({j, losses[j]});
  }
  return fb;
}

double empirical_regret(const RunTrace& trace) {
  double incurred = 0.0;
  for (double l : trace.incurred) incurred += l;
  if (trace.expert_cumulative.empty()) return incurred;
  return incurred - *std::min_element(trace.expert_cumulative.begin(), trace.expert_cumulative.end());
}

std::vector<double> regret_curve(const RunTrace& trace, const LossTable& losses) {
  const std::size_t k = losses.num_experts();
  if (losses.rounds() < trace.rounds()) throw ArgumentError("regret_curve: loss table too short");
  std::vector<double> cumulative(k, 0.0);
  std::vector<double> curve(trace.rounds());
  double incurred = 0.0;
  for (std::size_t t = 1; t <= trace.rounds(); ++t) {
    incurred += trace.incurred[t - 1];
    const auto row = losses.round(t);
    for (std::size_t i = 0; i < k; ++i) cumulative[i] += row[i];
    curve[t - 1] = incurred - *std::min_element(cumulative.begin(), cumulative.end());
  }
  return curve;
}

RunTrace run_episode(const LearnerConfig& config, const LossTable& losses,
                     const FeedbackModel& model, bool informative, std::uint64_t seed) {
  if (requires_static_graph(config.algorithm) && !model.is_static()) {
    throw ArgumentError(std::string(to_string(config.algorithm)) +
                        " cannot run on a time-varying graph");
  }
  Learner learner(config, model.graph(1), derive_seed(seed, streams::kLearner));
  RunTrace trace;
  trace.seed = seed;
  Episode episode(learner, losses, model, informative, Rng(derive_seed(seed, streams::kEnvironment)),
                  std::move(trace));
  episode.run();
  return episode.trace();
}

RunTrace run_episode(const LearnerConfig& config, const AdversarySpec& adversary,
                     const FeedbackModel& model, std::size_t horizon, bool informative,
                     std::uint64_t seed) {
  Rng adv(derive_seed(seed, streams::kAdversary));
  const LossTable losses = generate_losses(adversary, horizon, adv);
  return run_episode(config, losses, model, informative, seed);
}

}  // namespace graphbandit
