#pragma once

#include <cmath>
#include <cstdint>

namespace parity {

// Finalizer from splitmix64: bijective 64-bit mixer with good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Absorb one word into a running hash (splitmix64 increment + finalizer).
inline std::uint64_t hash_absorb(std::uint64_t state, std::uint64_t word) {
  return mix64(state + 0x9E3779B97F4A7C15ull + word);
}

// xoshiro256++ (Blackman & Vigna): 256-bit state, fast, passes BigCrush.
// Satisfies UniformRandomBitGenerator so <random> distributions run on it.
// Chosen over mt19937_64 because streams here are created per (unit, step)
// and the 4-word seeding is essentially free.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) {
    // Seed the four state words from a splitmix64 sequence, as the
    // generator's authors recommend.
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9E3779B97F4A7C15ull;
      w = mix64(x);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Purpose tags for independent random streams. Every consumer of
// randomness names its stream as (master seed, tag, unit index, step);
// results are therefore independent of thread count and evaluation order.
enum class StreamTag : std::uint64_t {
  kWeightInit = 1,
  kOracle = 2,
  kBatch = 3,
  kMcRep = 4,
  kOneHot = 5,
  kGeneric = 6,
};

inline Xoshiro256pp make_stream(std::uint64_t master_seed, StreamTag tag,
                                std::uint64_t unit = 0, std::uint64_t step = 0) {
  std::uint64_t h = mix64(master_seed);
  h = hash_absorb(h, static_cast<std::uint64_t>(tag));
  h = hash_absorb(h, unit);
  h = hash_absorb(h, step);
  return Xoshiro256pp(h);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Xoshiro256pp& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Standard normal draw via Box-Muller (self-contained so results do not
// depend on the standard library's distribution implementation).
inline double normal01(Xoshiro256pp& g) {
  const double u1 = 1.0 - uniform01(g);  // (0, 1]: keeps log finite
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace parity
