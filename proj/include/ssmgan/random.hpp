#pragma once

#include <cstdint>
#include <random>

namespace ssmgan {

// Seeded generator with a platform-independent float mapping. std::mt19937_64
// has a standardized output sequence; the distributions in <random> do not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 24 bits of resolution.
  float uniform01() { return static_cast<float>(engine_() >> 40) * 0x1.0p-24f; }
  float uniform(float lo, float hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t bits() { return engine_(); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : engine_() % bound; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ssmgan
