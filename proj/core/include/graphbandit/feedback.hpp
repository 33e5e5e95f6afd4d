#pragma once

#include <cstddef>
#include <vector>

namespace graphbandit {

struct Observation {
  std::size_t expert;
  double loss;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// What happened in round t after the learner chose `chosen`.
struct FeedbackEvent {
  std::size_t round = 0;  // 1-based t
  std::size_t chosen = 0;
  /// S_t, ascending by expert. Every entry is an out-neighbor of `chosen`.
  std::vector<Observation> observed;
  /// Loss of the chosen expert, recorded whether or not it was observed.
  double incurred_loss = 0.0;

  bool saw(std::size_t expert) const noexcept;
  const Observation* find(std::size_t expert) const noexcept;

  friend bool operator==(const FeedbackEvent&, const FeedbackEvent&) = default;
};

}  // namespace graphbandit
