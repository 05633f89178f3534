#pragma once

#include <cmath>
#include <cstdint>

namespace hpc {

// Counter-based deterministic PRNG (splitmix64 core). Every generator knows
// its base seed so independent substreams can be derived by tag; draw_count()
// exposes how many raw draws were consumed, which lets tests assert that a
// code path touched no randomness at all.
class Rng {
 public:
  explicit Rng(uint64_t seed) : base_(seed), state_(seed) {}

  uint64_t next_u64() {
    ++draws_;
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [lo, hi] inclusive
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
  }

  // Box-Muller, always exactly two raw draws (no cached spare: keeps the
  // draw count a pure function of the call sequence).
  double normal() {
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Independent substream; same (seed, a, b) always yields the same stream.
  Rng derive(uint64_t a, uint64_t b = 0) const {
    return Rng(mix(mix(base_, a ^ 0x8e9b5f1c4d2a7e31ull), b));
  }

  uint64_t draw_count() const { return draws_; }
  uint64_t seed() const { return base_; }

 private:
  static uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 0x165667b19e3779f9ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t base_;
  uint64_t state_;
  uint64_t draws_ = 0;
};

}  // namespace hpc
