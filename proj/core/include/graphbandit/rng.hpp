#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace graphbandit {

/// SplitMix64 finalizer. Used for seeding and for deriving sub-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// xoshiro256** generator with deterministic stream splitting.
///
/// `split(tag)` derives an independent child stream from the *seed* of this
/// stream and a tag, without consuming any draws from the parent. That keeps
/// the environment's draws unaffected by how many numbers a learner consumes.
class Rng {
 public:
  using result_type = std::uint64_t;
  using State = std::array<std::uint64_t, 4>;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, n). Lemire's nearly-divisionless method.
  std::uint64_t below(std::uint64_t n) noexcept;

  Rng split(std::uint64_t tag) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  const State& state() const noexcept { return s_; }
  /// Restores a previously captured state; the seed is kept for split().
  void restore(std::uint64_t seed, const State& state) noexcept {
    seed_ = seed;
    s_ = state;
  }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t seed_;
  State s_;
};

/// Well-known sub-stream tags used by the simulator.
namespace streams {
inline constexpr std::uint64_t kAdversary = 0xAD7E;
inline constexpr std::uint64_t kEnvironment = 0xE7F1;
inline constexpr std::uint64_t kLearner = 0x1EA2;
inline constexpr std::uint64_t kProbabilities = 0x9AB5;
}  // namespace streams

}  // namespace graphbandit
