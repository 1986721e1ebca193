#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace arm_alp {

// xoshiro256** seeded through splitmix64. split() hands out a child stream
// by consuming a draw from this stream and reseeding, so sibling streams are
// independent of how many numbers the parent later draws.
//
// All derived variates (uniform, normal, categorical) are computed here
// rather than through <random> distributions, whose output is
// implementation-defined.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "xoshiro256**/splitmix64-v1";

  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform();

  // Standard normal via Box-Muller; one variate per call (the partner value
  // is discarded so the stream position never depends on call history).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  // Index drawn with probability proportional to weights (which must be
  // non-negative with a positive sum).
  std::size_t categorical(std::span<const double> probabilities);

  Rng split();

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace arm_alp
