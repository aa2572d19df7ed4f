#pragma once

#include <cmath>
#include <cstdint>

// Self-contained, seedable PRNG stack. Standard-library distributions are
// implementation-defined, so traces would not be reproducible across
// toolchains; everything here is specified to the bit.
//
// Generator: xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
// Streams: stream(seed, k) gives statistically independent generators for
// parallel trials/traces.

namespace nvcycle {

inline constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  // Independent stream k derived from the same user seed.
  static Rng stream(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t sm = seed;
    std::uint64_t mixed = splitmix64_next(sm) ^ (k * 0xd1342543de82ef95ull);
    return Rng(mixed + k);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // Standard normal via Box-Muller (pairs cached, fixed draw order).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  // Poisson counts. Knuth's product method below the threshold, rounded
  // normal approximation above it (adequate for the photon-count means used
  // here; the switchover is documented behaviour, not tunable per call).
  std::uint32_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 64.0) {
      const double limit = std::exp(-mean);
      std::uint32_t count = 0;
      double product = uniform_pos();
      while (product > limit) {
        ++count;
        product *= uniform_pos();
      }
      return count;
    }
    const double draw = mean + std::sqrt(mean) * normal();
    return draw <= 0.0 ? 0u : static_cast<std::uint32_t>(draw + 0.5);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4] = {};
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace nvcycle
