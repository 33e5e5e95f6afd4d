// graphbandit: simulate online learning with uncertain feedback graphs.
//
//   graphbandit simulate --algo exp3-ip --algo exp3 --graph complete --K 10 --T 20000
//   graphbandit dataset  --data ccpp.csv --target PE --p uniform:0.25,0.5 --out out/
//   graphbandit oracle

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "graphbandit/environment.hpp"
#include "graphbandit/errors.hpp"
#include "graphbandit/experts.hpp"
#include "graphbandit/harness.hpp"
#include "graphbandit/oracles.hpp"

namespace gb = graphbandit;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct SharedOptions {
  std::vector<std::string> algos;
  std::string graph = "complete";
  std::size_t k = 10;
  std::string p;
  bool informative = true;
  std::size_t runs = 20;
  std::size_t horizon = 0;
  std::size_t m = 25;
  double xi = 1.0;
  std::string schedule = "inverse-sqrt";
  double epsilon = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

void add_shared(CLI::App* cmd, SharedOptions& o) {
  cmd->add_option("--algo", o.algos, "exp3, exp3-dom, exp3-ip, exp3-up, exp3-gr (repeatable)");
  cmd->add_option("--graph", o.graph, "graph file, 'complete' or 'bandit'")->capture_default_str();
  cmd->add_option("--K", o.k, "number of experts for complete/bandit graphs")->capture_default_str();
  cmd->add_option("--p", o.p, "equal:<v> or uniform:<lo>,<hi> (default: graph file, else equal:0.25)");
  cmd->add_flag("--informative,!--uninformative", o.informative,
                "reveal edge probabilities to the learners")->capture_default_str();
  cmd->add_option("--runs", o.runs, "independent runs")->capture_default_str();
  cmd->add_option("--T", o.horizon, "horizon (dataset mode: default whole stream)");
  cmd->add_option("--M", o.m, "minimum samples per edge (exp3-up, exp3-gr)")->capture_default_str();
  cmd->add_option("--xi", o.xi, "confidence width (exp3-up)")->capture_default_str();
  cmd->add_option("--schedule", o.schedule, "fixed:<eta> | inverse-sqrt | doubling")->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "lower bound on p for exp3-gr doubling (default: generator bound)");
  cmd->add_option("--seed", o.seed, "base seed")->capture_default_str();
  cmd->add_option("--out", o.out, "output directory for CSV results");
}

gb::ExperimentConfig build_config(const SharedOptions& o, std::size_t default_k) {
  gb::ExperimentConfig cfg;
  std::vector<std::string> names = o.algos;
  if (names.empty()) names = {"exp3", "exp3-dom", "exp3-ip", "exp3-up", "exp3-gr"};
  for (const auto& n : names) cfg.algorithms.push_back(gb::parse_algorithm(n));

  const std::size_t k = default_k ? default_k : o.k;
  if (o.graph == "complete") {
    cfg.graph = gb::NominalGraph::complete(k);
  } else if (o.graph == "bandit") {
    cfg.graph = gb::NominalGraph::bandit(k);
  } else {
    gb::GraphFile file = gb::load_graph_file(o.graph);
    cfg.graph = file.graph;
    if (file.has_probabilities) cfg.file_probabilities = file.probabilities;
  }
  if (!o.p.empty()) {
    cfg.probabilities = gb::parse_probability_generator(o.p);
  } else if (cfg.file_probabilities) {
    cfg.probabilities = gb::ProbabilityGenerator::graph_file();
  }
  cfg.mode = o.informative ? gb::ProbabilityMode::kInformative : gb::ProbabilityMode::kUninformative;
  cfg.runs = o.runs;
  cfg.horizon = o.horizon;
  cfg.M = o.m;
  cfg.xi = o.xi;
  cfg.schedule = gb::parse_schedule(o.schedule);
  if (o.epsilon > 0.0) cfg.epsilon = o.epsilon;
  cfg.seed = o.seed;
  return cfg;
}

gb::AdversarySpec parse_adversary(const std::string& text, std::size_t k) {
  auto rest = [&](std::size_t n) { return text.substr(n); };
  if (text.rfind("stochastic-gap:", 0) == 0) {
    return gb::AdversarySpec::stochastic_gap(k, std::stod(rest(15)));
  }
  if (text.rfind("switching:", 0) == 0) {
    const std::string body = rest(10);
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw gb::ArgumentError("expected switching:<gap>,<period>");
    return gb::AdversarySpec::switching(k, std::stod(body.substr(0, comma)),
                                        std::stoul(body.substr(comma + 1)));
  }
  if (text.rfind("table:", 0) == 0) return gb::AdversarySpec::fixed_table(gb::load_loss_csv(rest(6)));
  throw gb::ArgumentError("adversary must be stochastic-gap:<gap>, switching:<gap>,<period> or table:<csv>");
}

void print_summary(const gb::AggregateResult& r) {
  std::printf("%-10s %-8s %14s %14s\n", "algorithm", "metric", "final mean", "std");
  for (const auto& s : r.series) {
    std::printf("%-10s %-8s %14.6g %14.6g\n", std::string(gb::to_string(s.algorithm)).c_str(),
                s.metric.c_str(), s.mean.back(), s.std.back());
  }
}

void finish(const gb::AggregateResult& r, const SharedOptions& o) {
  print_summary(r);
  if (!o.out.empty()) {
    gb::emit_results(r, o.out);
    std::printf("wrote %s/{results,summary,runs,probabilities}.csv\n", o.out.c_str());
  }
}

int run_oracle(std::size_t draws, std::uint64_t seed) {
  bool ok = true;
  auto line = [&](const std::string& name, bool pass, const std::string& detail) {
    ok = ok && pass;
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  };
  char buf[256];

  const std::vector<double> weights{1.0, 2.0, 0.5, 1.5, 3.0};
  const std::vector<double> losses{0.9, 0.1, 0.5, 0.7, 0.3};
  const auto ip = gb::ip_unbiasedness(weights, losses, 0.25, 0.3, draws, seed);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    const auto& c = ip.first_moment[i];
    std::snprintf(buf, sizeof buf, "mean %.6f vs %.6f (z=%.2f)", c.mean, c.expected, c.z());
    line("ip-unbiased expert " + std::to_string(i + 1), c.within(4.0), buf);
  }
  for (double q : {0.1, 0.5, 0.9}) {
    for (std::size_t m : {5u, 25u}) {
      const auto gr = gb::gr_resampling(q, m, 0.8, draws, seed);
      std::snprintf(buf, sizeof buf, "E[Q] %.5f vs %.5f (z=%.2f); E[l~] %.5f vs %.5f (z=%.2f)",
                    gr.q_count.mean, gr.q_count.expected, gr.q_count.z(), gr.loss_estimate.mean,
                    gr.loss_estimate.expected, gr.loss_estimate.z());
      std::snprintf(buf + 200, 56, "q=%.1f M=%zu", q, m);
      line(std::string("gr-resampling ") + (buf + 200),
           gr.q_count.within(4.0) && gr.loss_estimate.within(4.0), buf);
    }
  }
  const std::vector<double> levels{0.25, 0.4, 0.6, 0.9};
  const auto est = gb::probability_estimation(4, 400, levels, 0.1, 100, seed);
  std::snprintf(buf, sizeof buf, "%zu/%zu replicates off by > 0.1 (max error %.4f)",
                est.failed_replicates, est.replicates, est.max_abs_error);
  line("probability-estimation", est.failed_replicates * 100 < est.replicates, buf);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning with uncertain feedback graphs"};
  app.require_subcommand(1);

  SharedOptions sim_opts;
  std::string adversary = "stochastic-gap:0.1";
  auto* sim = app.add_subcommand("simulate", "synthetic adversary; reports cumulative regret");
  add_shared(sim, sim_opts);
  sim->add_option("--adversary", adversary,
                  "stochastic-gap:<gap> | switching:<gap>,<period> | table:<csv>")
      ->capture_default_str();

  SharedOptions ds_opts;
  std::string data_path, target = "target", save_pool, load_pool_path;
  std::size_t synthetic_rows = 0;
  double train_fraction = gb::kDefaultTrainFraction;
  bool no_normalize = false;
  auto* ds = app.add_subcommand("dataset", "regression expert pool; reports MSE");
  add_shared(ds, ds_opts);
  ds->add_option("--data", data_path, "CSV with a header row");
  ds->add_option("--target", target, "target column name")->capture_default_str();
  ds->add_option("--synthetic", synthetic_rows, "use a generated dataset with this many rows");
  ds->add_option("--train-fraction", train_fraction, "training prefix fraction")->capture_default_str();
  ds->add_flag("--no-normalize", no_normalize, "targets are already in [0,1]");
  ds->add_option("--save-pool", save_pool, "write the trained expert pool to this file");
  ds->add_option("--load-pool", load_pool_path, "reuse a previously saved expert pool");

  std::size_t draws = 1'000'000;
  std::uint64_t oracle_seed = 7;
  auto* orc = app.add_subcommand("oracle", "Monte-Carlo checks of the loss estimators");
  orc->add_option("--draws", draws, "draws per check")->capture_default_str();
  orc->add_option("--seed", oracle_seed, "seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      if (sim_opts.horizon == 0) throw gb::ArgumentError("simulate needs --T");
      gb::ExperimentConfig cfg = build_config(sim_opts, 0);
      cfg.adversary = parse_adversary(adversary, cfg.graph.num_experts());
      finish(gb::run_experiment(cfg), sim_opts);
    } else if (ds->parsed()) {
      gb::Dataset d;
      if (synthetic_rows > 0) {
        d = gb::synthetic_regression(synthetic_rows, 4, ds_opts.seed, train_fraction);
      } else if (!data_path.empty()) {
        d = gb::load_csv(data_path, target, !no_normalize, train_fraction);
      } else {
        throw gb::ArgumentError("dataset needs --data <csv> or --synthetic <rows>");
      }
      const auto pool = load_pool_path.empty() ? gb::train_expert_pool(d) : gb::load_pool(load_pool_path);
      if (!save_pool.empty()) gb::save_pool(pool, save_pool);
      auto stream = std::make_shared<gb::PredictionTable>(gb::predict_stream(pool, d, d.train_rows));
      gb::ExperimentConfig cfg = build_config(ds_opts, pool.size());
      cfg.stream = std::move(stream);
      finish(gb::run_experiment(cfg), ds_opts);
    } else if (orc->parsed()) {
      return run_oracle(draws, oracle_seed) == 0 ? 0 : kExitRuntime;
    }
  } catch (const gb::RunFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.config_error() ? kExitConfig : kExitRuntime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gb::IngestionError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
