#include "graphbandit/schedule.hpp"

#include <cmath>
#include <sstream>

#include "graphbandit/errors.hpp"

namespace graphbandit {

Schedule parse_schedule(std::string_view text) {
  if (text == "inverse-sqrt") return Schedule::inverse_sqrt();
  if (text == "doubling") return Schedule::doubling();
  if (text.rfind("fixed:", 0) == 0) {
    const std::string num(text.substr(6));
    std::size_t used = 0;
    double eta = 0.0;
    try {
      eta = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) {
      throw ArgumentError("schedule: bad eta in '" + std::string(text) + "'");
    }
    if (!(eta > 0.0 && eta <= 1.0)) throw ArgumentError("schedule: fixed eta must lie in (0, 1]");
    return Schedule::fixed(eta);
  }
  throw ArgumentError("schedule: expected fixed:<eta>, inverse-sqrt or doubling, got '" +
                      std::string(text) + "'");
}

std::string to_string(const Schedule& s) {
  switch (s.kind) {
    case ScheduleKind::kFixed: {
      std::ostringstream os;
      os.precision(17);
      os << "fixed:" << s.eta;
      return os.str();
    }
    case ScheduleKind::kInverseSqrt:
      return "inverse-sqrt";
    case ScheduleKind::kDoubling:
      return "doubling";
  }
  return "?";
}

double doubling_eta(int epoch, double ln_k) { return std::sqrt(ln_k / std::ldexp(1.0, epoch + 1)); }

DoublingState ip_doubling_start(std::size_t num_experts) {
  DoublingState s;
  s.eta = doubling_eta(0, std::log(static_cast<double>(num_experts)));
  return s;
}

IpDoublingStep ip_doubling_step(const DoublingState& state, const Pmf& pmf,
                                std::span<const double> q, double ln_k) {
  if (q.size() != pmf.size()) throw ArgumentError("ip_doubling_step: q size mismatch");
  double ratio_sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (pmf[i] == 0.0) continue;
    if (!(q[i] > 0.0)) throw InvariantViolation("ip_doubling_step: q_i <= 0 with pi_i > 0");
    ratio_sum += pmf[i] / q[i];
  }
  IpDoublingStep out{state, false, 0.0};
  out.state.accumulated += 1.0 + 0.5 * ratio_sum;
  while (out.state.accumulated > std::ldexp(1.0, out.state.epoch)) {
    ++out.state.epoch;
    out.restart = true;
  }
  out.state.eta = doubling_eta(out.state.epoch, ln_k);
  out.eta = out.state.eta;
  return out;
}

int up_start_epoch(std::size_t num_experts) {
  if (num_experts == 0) throw ArgumentError("up_start_epoch: K must be positive");
  int b = 0;
  while ((std::size_t{1} << b) < num_experts) ++b;
  return b;
}

UpParams up_doubling_params(int b, std::size_t num_experts) {
  if (num_experts < 2) throw ArgumentError("up_doubling_params: K must be at least 2");
  if (b < up_start_epoch(num_experts)) {
    throw ArgumentError("up_doubling_params: epoch b=" + std::to_string(b) +
                        " precedes start epoch ceil(log2 K)");
  }
  const double k = static_cast<double>(num_experts);
  const double ln_k = std::log(k);
  UpParams p{};
  p.eta = doubling_eta(b, ln_k);
  const double m = std::exp2(2.0 * (b + 1) / 3.0) / std::sqrt(k) + std::log(4.0 * k);
  p.M = static_cast<std::size_t>(std::ceil(m));
  p.xi = (2.0 * std::pow(k, 0.25) + std::sqrt(4.0 * std::sqrt(k) + 1.0)) *
         std::sqrt(std::log(k * std::ldexp(1.0, b + 3)));
  return p;
}

GrParams gr_doubling_params(int b, std::size_t num_experts, std::size_t dom_size, double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("gr_doubling_params: epsilon must be positive");
  if (dom_size == 0) throw ArgumentError("gr_doubling_params: dominating set is empty");
  if (b < 0) throw ArgumentError("gr_doubling_params: negative epoch");
  if (num_experts < 2) throw ArgumentError("gr_doubling_params: K must be at least 2");
  const double ln_k = std::log(static_cast<double>(num_experts));
  GrParams p{};
  p.eta = doubling_eta(b, ln_k);
  const double m = (b + 1) * std::sqrt(std::ldexp(1.0, b - 1)) * static_cast<double>(dom_size) *
                   std::log(2.0) / (epsilon * std::sqrt(ln_k));
  p.M = static_cast<std::size_t>(std::ceil(m));
  return p;
}

int epoch_for_round(std::size_t t, int start) {
  int b = 0;
  while ((std::size_t{1} << (b + 1)) < t) ++b;
  return b < start ? start : b;
}

std::size_t top_up_rounds(std::size_t num_experts, std::size_t m_old, std::size_t m_new) {
  return m_new > m_old ? num_experts * (m_new - m_old) : 0;
}

}  // namespace graphbandit
