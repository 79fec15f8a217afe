#pragma once

#include <cstdint>
#include <random>

namespace sdnmob {

// Seeded generator used for every random choice in a run.
//
// Draws come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. uniform_index(n) rejects raw outputs below (2^64 mod n) and returns
// the remainder modulo n, so results are unbiased and identical on every
// platform (std::uniform_int_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % n;
    }
  }

  // Independent stream for a sub-component (splitmix64 of seed and salt).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sdnmob
