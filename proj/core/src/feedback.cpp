#include "graphbandit/feedback.hpp"

#include <algorithm>

namespace graphbandit {

const Observation* FeedbackEvent::find(std::size_t expert) const noexcept {
  auto it = std::lower_bound(observed.begin(), observed.end(), expert,
                             [](const Observation& o, std::size_t e) { return o.expert < e; });
  return it != observed.end() && it->expert == expert ? &*it : nullptr;
}

bool FeedbackEvent::saw(std::size_t expert) const noexcept { return find(expert) != nullptr; }

}  // namespace graphbandit
