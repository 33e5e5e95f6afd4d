#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "graphbandit/environment.hpp"
#include "graphbandit/experts.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/learner.hpp"
#include "graphbandit/schedule.hpp"

namespace graphbandit {

enum class ProbabilityMode { kInformative, kUninformative };

/// How a run's edge probabilities are produced.
struct ProbabilityGenerator {
  enum class Kind { kEqual, kUniform, kGraphFile };
  Kind kind = Kind::kEqual;
  double lo = 0.25;  // kEqual: the value
  double hi = 0.25;

  static ProbabilityGenerator equal(double v) { return {Kind::kEqual, v, v}; }
  static ProbabilityGenerator uniform(double lo, double hi) { return {Kind::kUniform, lo, hi}; }
  /// Use the table carried by the graph file as-is.
  static ProbabilityGenerator graph_file() { return {Kind::kGraphFile, 0.0, 0.0}; }

  /// Lower bound on generated probabilities.
  double epsilon() const noexcept { return lo; }
};

/// Parses `equal:<v>` or `uniform:<lo>,<hi>`.
ProbabilityGenerator parse_probability_generator(std::string_view text);

struct ExperimentConfig {
  std::vector<Algorithm> algorithms;
  NominalGraph graph = NominalGraph::complete(2);
  /// Probabilities from a graph file, read when the generator is kGraphFile.
  std::optional<EdgeProbabilityTable> file_probabilities;
  ProbabilityMode mode = ProbabilityMode::kInformative;
  ProbabilityGenerator probabilities = ProbabilityGenerator::equal(0.25);
  std::size_t runs = 20;
  std::size_t horizon = 0;  // 0 in dataset mode: the whole stream
  Schedule schedule = Schedule::inverse_sqrt();
  std::size_t M = 25;
  double xi = 1.0;
  /// Exp3-GR doubling lower bound; defaults to the generator's lower bound.
  std::optional<double> epsilon;
  std::uint64_t seed = 1;
  /// Explicit per-run seeds; when empty, run n uses splitmix64(seed + n).
  std::vector<std::uint64_t> seeds;
  /// Synthetic mode adversary. Ignored when `stream` is set.
  AdversarySpec adversary = AdversarySpec::stochastic_gap(2, 0.1);
  /// Dataset mode: expert predictions and truths of the online stream.
  std::shared_ptr<const PredictionTable> stream;
  /// 0: use GRAPHBANDIT_THREADS or the hardware concurrency.
  std::size_t threads = 0;
  /// Number of checkpoints along the horizon.
  std::size_t checkpoints = 200;

  bool dataset_mode() const noexcept { return stream != nullptr; }
  std::size_t effective_horizon() const;
  std::uint64_t run_seed(std::size_t run) const;
  LearnerConfig learner_config(Algorithm a) const;
  /// Throws ArgumentError on an invalid combination.
  void validate() const;
};

namespace metrics {
inline constexpr std::string_view kRegret = "regret";
inline constexpr std::string_view kMse = "mse";
}  // namespace metrics

/// Mean and spread across runs of one metric of one algorithm.
struct Series {
  Algorithm algorithm;
  std::string metric;
  std::vector<std::vector<double>> per_run;  // runs x checkpoints
  std::vector<double> mean;
  std::vector<double> std;  // sample standard deviation; 0 for a single run

  double final_mean() const { return mean.back(); }
  std::vector<double> final_per_run() const;
};

struct AggregateResult {
  std::vector<std::size_t> checkpoints;
  std::vector<Series> series;
  std::vector<std::uint64_t> run_seeds;
  /// loss_hashes[run][algorithm index]: the loss table each episode saw.
  std::vector<std::vector<std::uint64_t>> loss_hashes;
  std::vector<EdgeProbabilityTable> probability_tables;

  /// Throws ArgumentError if absent.
  const Series& find(Algorithm a, std::string_view metric) const;
};

/// Rounds ceil(T/n), 2 ceil(T/n), ..., always ending at T.
std::vector<std::size_t> checkpoint_rounds(std::size_t horizon, std::size_t count);

/// Mean over runs of the per-run average squared error up to round t.
/// `predictions[n][tau]` is run n's prediction at round tau+1.
double running_mse(const std::vector<std::vector<double>>& predictions,
                   std::span<const double> truths, std::size_t t);

/// Fills mean and std from per_run.
void summarize(Series& s);

/// Failure of one episode, tagged with the run and algorithm it came from.
class RunFailure : public std::runtime_error {
 public:
  RunFailure(const std::string& what, bool config_error)
      : std::runtime_error(what), config_error_(config_error) {}
  bool config_error() const noexcept { return config_error_; }

 private:
  bool config_error_;
};

AggregateResult run_experiment(const ExperimentConfig& cfg);

// Writes results.csv (t,algorithm,metric,mean,std), summary.csv,
// runs.csv and probabilities.csv into `dir`. Expert indices are 1-based.
void emit_results(const AggregateResult& result, const std::filesystem::path& dir);

/// Threads to use: GRAPHBANDIT_THREADS if set, else hardware concurrency.
std::size_t default_thread_count();

}  // namespace graphbandit
