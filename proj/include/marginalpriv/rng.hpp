#ifndef MARGINALPRIV_RNG_HPP
#define MARGINALPRIV_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace marginalpriv {

// splitmix64 output function; used for seed expansion and stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Child-stream seed: the component label and an optional trial index mixed
// into the master seed. This is the single derivation rule the whole
// project (library, CLI, experiment harness) uses; see README.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index = 0) {
  const std::uint64_t golden = 0x9E3779B97F4A7C15ull;
  return mix64(mix64(master ^ fnv1a64(label)) + golden * (index + 1));
}

// Deterministic pseudorandom stream (xoshiro256++ over a splitmix64-expanded
// 64-bit seed). Fully specified here so that a seed reproduces the same
// variates on every platform; libm transcendentals are the only
// platform-sensitive surface left.
//
// Uniform variates are taken in (0, 1], so -log(u) is always finite.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t st = seed;
    for (auto& w : s_) {
      st += 0x9E3779B97F4A7C15ull;
      w = mix64(st);
    }
  }

  std::uint64_t next_u64() {
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

  // Uniform on (0, 1].
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on (-1, 1].
  double uniform_symmetric() { return 2.0 * uniform() - 1.0; }

  // Standard exponential via inverse CDF.
  double exponential() { return -std::log(uniform()); }

  // Standard normal, Box-Muller; the spare half of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(2.0 * exponential());
    const double theta = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double stddev) { return stddev * normal(); }

  // Laplace with the given scale: exponential magnitude, random sign.
  double laplace(double scale) {
    const double e = scale * exponential();
    return (next_u64() & 1) ? e : -e;
  }

  bool bernoulli(double p) { return uniform() <= p; }

  // Uniform integer in [0, n); rejection sampling over a power-of-two mask.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t v;
    do {
      v = next_u64() & mask;
    } while (v >= n);
    return v;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace marginalpriv

#endif  // MARGINALPRIV_RNG_HPP
