#include "graphbandit/learner.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "graphbandit/errors.hpp"

namespace graphbandit {
namespace {

constexpr int kSnapshotVersion = 1;
constexpr std::string_view kSnapshotFormat = "graphbandit-learner";

double clamp_eta(double eta) { return eta > 1.0 ? 1.0 : eta; }

}  // namespace

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::kExp3:
      return "exp3";
    case Algorithm::kExp3Dom:
      return "exp3-dom";
    case Algorithm::kExp3Ip:
      return "exp3-ip";
    case Algorithm::kExp3Up:
      return "exp3-up";
    case Algorithm::kExp3Gr:
      return "exp3-gr";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kExp3, Algorithm::kExp3Dom, Algorithm::kExp3Ip,
                      Algorithm::kExp3Up, Algorithm::kExp3Gr}) {
    if (name == to_string(a)) return a;
  }
  throw ArgumentError("unknown algorithm '" + std::string(name) +
                      "' (expected exp3, exp3-dom, exp3-ip, exp3-up or exp3-gr)");
}

void LearnerConfig::validate() const {
  if (schedule.kind == ScheduleKind::kFixed && !(schedule.eta > 0.0 && schedule.eta <= 1.0)) {
    throw ArgumentError("learner: fixed eta must lie in (0, 1]");
  }
  if (requires_static_graph(algorithm) && schedule.kind != ScheduleKind::kDoubling && M == 0) {
    throw ArgumentError("learner: M must be positive");
  }
  if (algorithm == Algorithm::kExp3Up && !(xi >= 1.0)) {
    throw ArgumentError("learner: xi must be at least 1");
  }
  if (algorithm == Algorithm::kExp3Gr && schedule.kind == ScheduleKind::kDoubling &&
      !(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ArgumentError("learner: Exp3-GR doubling needs epsilon in (0, 1]");
  }
}

Learner::Learner(LearnerConfig config, NominalGraph graph, std::uint64_t seed)
    : config_(config),
      graph_(std::move(graph)),
      rng_(seed),
      weights_(WeightVector::uniform(graph_.num_experts())),
      m_(config.M),
      xi_(config.xi) {
  config_.validate();
  const std::size_t k = graph_.num_experts();
  if (requires_static_graph(config_.algorithm)) {
    dominating_ = greedy_dominating_set(graph_);
    if (config_.algorithm == Algorithm::kExp3Up) estimator_ = ProbabilityEstimator(k);
    if (config_.schedule.kind == ScheduleKind::kDoubling) {
      m_ = 0;
      const int start = config_.algorithm == Algorithm::kExp3Up ? up_start_epoch(k) : 0;
      begin_doubling_epoch(start);
    } else {
      explore_remaining_ = k * m_;
    }
    if (config_.algorithm == Algorithm::kExp3Gr) buffer_ = ResampleBuffer(k, m_);
  } else {
    doubling_ = ip_doubling_start(k);
  }
}

void Learner::begin_doubling_epoch(int epoch) {
  const std::size_t k = graph_.num_experts();
  const std::size_t m_old = m_;
  if (config_.algorithm == Algorithm::kExp3Up) {
    const UpParams p = up_doubling_params(epoch, k);
    doubling_.eta = p.eta;
    doubling_.M = p.M;
    doubling_.xi = p.xi;
    xi_ = p.xi;
  } else {
    const GrParams p = gr_doubling_params(epoch, k, dominating_.size(), config_.epsilon);
    doubling_.eta = p.eta;
    doubling_.M = p.M;
  }
  doubling_.epoch = epoch;
  m_ = std::max(m_old, doubling_.M);
  if (explore_remaining_ == 0) explore_done_ = 0;
  explore_remaining_ += top_up_rounds(k, m_old, m_);
  buffer_.set_capacity(m_);
}

void Learner::restart_weights() { weights_ = WeightVector::uniform(graph_.num_experts()); }

const VertexSet& Learner::dominating_for(const NominalGraph& g) {
  if (!cached_graph_ || !(*cached_graph_ == g)) {
    cached_graph_ = g;
    cached_dominating_ = greedy_dominating_set(g);
  }
  return cached_dominating_;
}

std::size_t Learner::select(std::size_t t, const NominalGraph& g,
                            const EdgeProbabilityTable* informative) {
  if (pending_) throw ProtocolError("select: previous round has not been updated");
  if (t != rounds_ + 1) {
    throw ProtocolError("select: expected round " + std::to_string(rounds_ + 1) + ", got " +
                        std::to_string(t));
  }
  const std::size_t k = graph_.num_experts();
  if (g.num_experts() != k) throw ArgumentError("select: graph has the wrong number of experts");

  const auto& sched = config_.schedule;
  if (requires_static_graph(config_.algorithm)) {
    if (!(g == graph_)) {
      throw ArgumentError(std::string(to_string(config_.algorithm)) +
                          " requires a static nominal graph");
    }
    if (sched.kind == ScheduleKind::kDoubling) {
      const int start = config_.algorithm == Algorithm::kExp3Up ? up_start_epoch(k) : 0;
      const int b = epoch_for_round(t, start);
      if (b > doubling_.epoch) {
        begin_doubling_epoch(b);
        restart_weights();
        ++restarts_;
      }
    }
  }

  switch (sched.kind) {
    case ScheduleKind::kFixed:
      eta_ = sched.eta;
      break;
    case ScheduleKind::kInverseSqrt:
      eta_ = 1.0 / std::sqrt(static_cast<double>(t));
      break;
    case ScheduleKind::kDoubling:
      eta_ = clamp_eta(doubling_.eta);
      break;
  }

  pending_pmf_.reset();
  pending_q_.clear();
  pending_exploration_ = false;

  if (requires_static_graph(config_.algorithm)) {
    if (explore_remaining_ > 0) {
      const std::size_t phase = (explore_done_ + explore_remaining_) / k;
      pending_choice_ = exploration_index(explore_done_ + 1, k, phase);
      pending_exploration_ = true;
    } else {
      pending_pmf_.emplace(exp3up_pmf(weights_, eta_, dominating_));
      pending_choice_ = sample_index(*pending_pmf_, rng_);
    }
  } else {
    std::optional<NominalGraph> bandit;
    const NominalGraph* g_eff = &g;
    if (config_.algorithm == Algorithm::kExp3) {
      bandit.emplace(NominalGraph::bandit(k));
      g_eff = &*bandit;
    }
    std::optional<EdgeProbabilityTable> ones;
    const EdgeProbabilityTable* p_eff = nullptr;
    if (config_.algorithm == Algorithm::kExp3Ip) {
      if (informative == nullptr) {
        throw ArgumentError("exp3-ip needs the edge probabilities (informative mode)");
      }
      if (informative->num_experts() != k) throw ArgumentError("select: probability table size");
      p_eff = informative;
    } else {
      ones.emplace(EdgeProbabilityTable::equal(*g_eff, 1.0));
      p_eff = &*ones;
    }
    const VertexSet& d = dominating_for(*g_eff);
    pending_pmf_.emplace(exp3ip_pmf(weights_, eta_, *g_eff, *p_eff, d));
    pending_q_.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      pending_q_[i] = exp3ip_observation_prob(*pending_pmf_, *g_eff, *p_eff, i);
    }
    pending_choice_ = sample_index(*pending_pmf_, rng_);
  }
  pending_ = true;
  return pending_choice_;
}

std::vector<EdgeDraw> Learner::edge_draws(const FeedbackEvent& fb) const {
  std::vector<EdgeDraw> draws;
  for (std::size_t j = 0; j < graph_.num_experts(); ++j) {
    if (graph_.has_edge(fb.chosen, j)) draws.push_back({j, fb.saw(j)});
  }
  return draws;
}

void Learner::apply_update(double eta, const std::vector<double>& estimates) {
  weights_ = exp_weight_update(weights_, eta, estimates);
}

void Learner::update(const FeedbackEvent& fb) {
  if (!pending_) throw ProtocolError("update: no pending selection");
  if (fb.round != rounds_ + 1) {
    throw ProtocolError("update: feedback for round " + std::to_string(fb.round) +
                        " but the pending round is " + std::to_string(rounds_ + 1));
  }
  if (fb.chosen != pending_choice_) {
    throw ProtocolError("update: feedback names expert " + std::to_string(fb.chosen + 1) +
                        " but expert " + std::to_string(pending_choice_ + 1) + " was selected");
  }
  const std::size_t k = graph_.num_experts();
  const NominalGraph* real_graph = nullptr;
  if (requires_static_graph(config_.algorithm)) {
    real_graph = &graph_;
  } else if (config_.algorithm != Algorithm::kExp3) {
    real_graph = &*cached_graph_;
  }
  for (const Observation& o : fb.observed) {
    if (o.expert >= k) throw ProtocolError("update: observed expert out of range");
    if (real_graph != nullptr && !real_graph->has_edge(fb.chosen, o.expert)) {
      throw ProtocolError("update: observed expert is not an out-neighbor of the chosen one");
    }
    if (!(o.loss >= 0.0 && o.loss <= 1.0)) throw ContractViolation("update: loss outside [0, 1]");
  }

  std::vector<double> est(k, 0.0);
  switch (config_.algorithm) {
    case Algorithm::kExp3:
    case Algorithm::kExp3Dom:
    case Algorithm::kExp3Ip: {
      const Pmf& pmf = *pending_pmf_;
      if (config_.algorithm == Algorithm::kExp3) {
        if (const Observation* own = fb.find(fb.chosen)) {
          est[fb.chosen] = importance_loss_estimate(own->loss, pmf[fb.chosen], true);
        }
      } else {
        for (const Observation& o : fb.observed) {
          est[o.expert] = importance_loss_estimate(o.loss, pending_q_[o.expert], true);
        }
      }
      if (config_.schedule.kind == ScheduleKind::kDoubling) {
        const IpDoublingStep step =
            ip_doubling_step(doubling_, pmf, pending_q_, std::log(static_cast<double>(k)));
        doubling_ = step.state;
        if (step.restart) {
          restart_weights();
          ++restarts_;
        } else {
          apply_update(eta_, est);
        }
      } else {
        apply_update(eta_, est);
      }
      break;
    }
    case Algorithm::kExp3Up: {
      const std::vector<EdgeDraw> draws = edge_draws(fb);
      if (!pending_exploration_) {
        for (const Observation& o : fb.observed) {
          const double qhat = exp3up_qhat(*pending_pmf_, graph_, estimator_, xi_, m_, o.expert);
          est[o.expert] = exp3up_loss_estimate(o.loss, qhat, true);
        }
      }
      estimator_.update(fb.chosen, graph_, draws);
      if (!pending_exploration_) apply_update(eta_, est);
      break;
    }
    case Algorithm::kExp3Gr: {
      if (!pending_exploration_) {
        ResamplingRound resampler(*pending_pmf_, graph_, buffer_, m_, rng_);
        for (const Observation& o : fb.observed) {
          est[o.expert] = gr_loss_estimate(o.loss, resampler.count(o.expert), m_, true);
        }
      }
      for (const EdgeDraw& d : edge_draws(fb)) buffer_.push(fb.chosen, d.target, d.revealed);
      if (!pending_exploration_) apply_update(eta_, est);
      break;
    }
  }

  if (pending_exploration_) {
    --explore_remaining_;
    ++explore_done_;
    if (explore_remaining_ == 0) {
      explore_done_ = 0;
      if (config_.algorithm == Algorithm::kExp3Gr && !buffer_.full(graph_, m_)) {
        throw InvariantViolation("Exp3-GR left exploration with an underfull buffer");
      }
    }
  }
  ++rounds_;
  pending_ = false;
}

std::string Learner::snapshot() const {
  if (pending_) throw ProtocolError("snapshot: a round is pending");
  using nlohmann::json;
  const std::size_t k = graph_.num_experts();
  json j;
  j["format"] = kSnapshotFormat;
  j["version"] = kSnapshotVersion;
  j["algorithm"] = to_string(config_.algorithm);
  j["config"] = {{"schedule", to_string(config_.schedule)},
                 {"M", config_.M},
                 {"xi", config_.xi},
                 {"epsilon", config_.epsilon}};
  std::string adjacency;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) adjacency.push_back(graph_.has_edge(a, b) ? '1' : '0');
  }
  j["graph"] = {{"K", k}, {"adjacency", adjacency}};
  j["round"] = rounds_;
  j["log_weights"] = std::vector<double>(weights_.log_weights().begin(), weights_.log_weights().end());
  j["eta"] = eta_;
  j["M"] = m_;
  j["xi"] = xi_;
  j["restarts"] = restarts_;
  j["doubling"] = {{"epoch", doubling_.epoch},
                   {"accumulated", doubling_.accumulated},
                   {"eta", doubling_.eta},
                   {"M", doubling_.M},
                   {"xi", doubling_.xi}};
  j["exploration"] = {{"remaining", explore_remaining_}, {"done", explore_done_}};
  if (config_.algorithm == Algorithm::kExp3Up) {
    j["counts"] = std::vector<std::uint64_t>(estimator_.counts().begin(), estimator_.counts().end());
    j["sums"] = std::vector<std::uint64_t>(estimator_.sums().begin(), estimator_.sums().end());
  }
  if (config_.algorithm == Algorithm::kExp3Gr) {
    json buffers = json::array();
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        std::string bits;
        for (auto s : buffer_.samples(a, b)) bits.push_back(s ? '1' : '0');
        buffers.push_back(bits);
      }
    }
    j["buffers"] = {{"capacity", buffer_.capacity()}, {"edges", buffers}};
  }
  j["rng"] = {{"seed", rng_.seed()},
              {"state", std::vector<std::uint64_t>(rng_.state().begin(), rng_.state().end())}};
  return j.dump();
}

Learner Learner::restore(std::string_view snapshot) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(snapshot);
  } catch (const json::exception& e) {
    throw IngestionError(std::string("learner snapshot: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kSnapshotFormat) {
      throw IngestionError("learner snapshot: wrong format tag");
    }
    if (j.at("version").get<int>() != kSnapshotVersion) {
      throw IngestionError("learner snapshot: unsupported version");
    }
    LearnerConfig cfg;
    cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    const auto& c = j.at("config");
    cfg.schedule = parse_schedule(c.at("schedule").get<std::string>());
    cfg.M = c.at("M").get<std::size_t>();
    cfg.xi = c.at("xi").get<double>();
    cfg.epsilon = c.at("epsilon").get<double>();

    const std::size_t k = j.at("graph").at("K").get<std::size_t>();
    const auto adjacency = j.at("graph").at("adjacency").get<std::string>();
    if (adjacency.size() != k * k) throw IngestionError("learner snapshot: adjacency size");
    std::vector<std::uint8_t> adj(k * k);
    for (std::size_t e = 0; e < adj.size(); ++e) adj[e] = adjacency[e] == '1';

    const auto& r = j.at("rng");
    const auto state_words = r.at("state").get<std::vector<std::uint64_t>>();
    if (state_words.size() != 4) throw IngestionError("learner snapshot: rng state size");
    const auto seed = r.at("seed").get<std::uint64_t>();

    Learner l(cfg, NominalGraph(k, std::move(adj)), seed);
    Rng::State st{};
    std::copy(state_words.begin(), state_words.end(), st.begin());
    l.rng_.restore(seed, st);
    l.weights_ = WeightVector::from_log(j.at("log_weights").get<std::vector<double>>());
    if (l.weights_.size() != k) throw IngestionError("learner snapshot: weight count");
    l.rounds_ = j.at("round").get<std::size_t>();
    l.eta_ = j.at("eta").get<double>();
    l.m_ = j.at("M").get<std::size_t>();
    l.xi_ = j.at("xi").get<double>();
    l.restarts_ = j.at("restarts").get<std::size_t>();
    const auto& d = j.at("doubling");
    l.doubling_.epoch = d.at("epoch").get<int>();
    l.doubling_.accumulated = d.at("accumulated").get<double>();
    l.doubling_.eta = d.at("eta").get<double>();
    l.doubling_.M = d.at("M").get<std::size_t>();
    l.doubling_.xi = d.at("xi").get<double>();
    l.explore_remaining_ = j.at("exploration").at("remaining").get<std::size_t>();
    l.explore_done_ = j.at("exploration").at("done").get<std::size_t>();
    if (cfg.algorithm == Algorithm::kExp3Up) {
      l.estimator_ = ProbabilityEstimator::from_raw(k, j.at("counts").get<std::vector<std::uint64_t>>(),
                                                    j.at("sums").get<std::vector<std::uint64_t>>());
    }
    if (cfg.algorithm == Algorithm::kExp3Gr) {
      const auto& b = j.at("buffers");
      ResampleBuffer buf(k, b.at("capacity").get<std::size_t>());
      const auto edges = b.at("edges").get<std::vector<std::string>>();
      if (edges.size() != k * k) throw IngestionError("learner snapshot: buffer count");
      for (std::size_t e = 0; e < edges.size(); ++e) {
        for (char bit : edges[e]) buf.push(e / k, e % k, bit == '1');
      }
      l.buffer_ = std::move(buf);
    }
    return l;
  } catch (const json::exception& e) {
    throw IngestionError(std::string("learner snapshot: ") + e.what());
  }
}

}  // namespace graphbandit
