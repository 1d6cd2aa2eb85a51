// prng.hpp — fixed, portable pseudorandom generator (splitmix64).
//
// state' = state + 0x9E3779B97F4A7C15; output mixes with shifts/multiplies
// (Steele, Lea, Flood 2014). Doubles are drawn as (x >> 11) * 2^-53, so every
// stream is reproducible bit-for-bit across platforms and languages from the
// seed alone.

#pragma once

#include <cstdint>

namespace rcc {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [-1, 1)
    double next_signed() { return 2.0 * next_double() - 1.0; }

    // uniform in {0, 1, ..., n-1}; n must be > 0
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

}  // namespace rcc
