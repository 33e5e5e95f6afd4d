#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "graphbandit/estimator.hpp"

namespace graphbandit {

enum class ScheduleKind {
  kFixed,        // constant eta
  kInverseSqrt,  // eta_t = 1/sqrt(t)
  kDoubling,     // horizon-free epochs
};

struct Schedule {
  ScheduleKind kind = ScheduleKind::kInverseSqrt;
  double eta = 0.0;  // only read for kFixed

  static Schedule fixed(double eta) { return {ScheduleKind::kFixed, eta}; }
  static Schedule inverse_sqrt() { return {ScheduleKind::kInverseSqrt, 0.0}; }
  static Schedule doubling() { return {ScheduleKind::kDoubling, 0.0}; }
};

/// Parses `fixed:<eta>`, `inverse-sqrt` or `doubling`.
Schedule parse_schedule(std::string_view text);
std::string to_string(const Schedule& s);

/// Epoch bookkeeping for the doubling trick.
struct DoublingState {
  int epoch = 0;             // r for Exp3-IP, b for Exp3-UP / Exp3-GR
  double accumulated = 0.0;  // running sum of Q_t (Exp3-IP only)
  double eta = 0.0;
  std::size_t M = 0;
  double xi = 0.0;

  friend bool operator==(const DoublingState&, const DoublingState&) = default;
};

/// sqrt(ln K / 2^(e+1)); the same form serves every algorithm's epoch e.
double doubling_eta(int epoch, double ln_k);

struct IpDoublingStep {
  DoublingState state;
  bool restart = false;
  double eta = 0.0;
};

/// Initial Exp3-IP doubling state (r = 0).
DoublingState ip_doubling_start(std::size_t num_experts);

// Adds Q_t = 1 + 1/2 sum_i pmf_i / q_i to the running total. When the total
// exceeds 2^r, r jumps to the smallest integer with total <= 2^r and a restart
// is signalled.
IpDoublingStep ip_doubling_step(const DoublingState& state, const Pmf& pmf,
                                std::span<const double> q, double ln_k);

struct UpParams {
  double eta;
  std::size_t M;
  double xi;
};

struct GrParams {
  double eta;
  std::size_t M;
};

/// First Exp3-UP epoch: ceil(log2 K).
int up_start_epoch(std::size_t num_experts);

UpParams up_doubling_params(int b, std::size_t num_experts);

GrParams gr_doubling_params(int b, std::size_t num_experts, std::size_t dom_size, double epsilon);

/// Epoch b with 2^b < t <= 2^(b+1), never below `start`.
int epoch_for_round(std::size_t t, int start);

/// Rounds of round-robin exploration needed to lift every edge from
/// M_old to M_new samples: K * (M_new - M_old), or 0 if M did not grow.
std::size_t top_up_rounds(std::size_t num_experts, std::size_t m_old, std::size_t m_new);

}  // namespace graphbandit
