#pragma once

#include <cstdint>

#include "slnlap/special.hpp"

namespace slnlap {

// Counter-based uniform generator: the value at a counter depends only on
// (seed, counter), so streams can be replayed, split into blocks, and shared
// across theta values (common random numbers) without sequential state.
// Mixing function is the splitmix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t counter) const {
    std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in the open interval (0,1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via inverse-CDF transform (keeps common random numbers
  // exact across consumers).
  double normal(std::uint64_t counter) const {
    return inv_norm_cdf(uniform(counter));
  }

 private:
  std::uint64_t seed_;
};

}  // namespace slnlap
