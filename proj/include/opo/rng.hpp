#pragma once

#include <cmath>
#include <cstdint>

namespace opo {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// One-shot derived seed (e.g. for per-detector sub-streams).
inline std::uint64_t splitmix_of(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t sm = seed ^ (salt * 0x9e3779b97f4a7c15ULL);
  return splitmix64(sm);
}

// xoshiro256** seeded via splitmix64. Self-contained so streams are
// bit-reproducible independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  // Derive an independent stream for a simulation slab.
  static Rng for_slab(std::uint64_t master_seed, std::uint64_t slab_index) {
    std::uint64_t sm = master_seed;
    const std::uint64_t a = splitmix64(sm);
    sm = slab_index ^ 0xd1b54a32d192ed03ULL;
    return Rng(a ^ splitmix64(sm));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in (0, 1]; never returns 0 so log() is safe.
  double uniform() { return ((next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() <= p; }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  // Two-sided exponential with mean |x| = scale.
  double laplace(double scale) {
    const double u = uniform();
    const double mag = -std::log(uniform()) * scale;
    return u <= 0.5 ? -mag : mag;
  }

  double normal() {
    // Box-Muller; one draw discarded for simplicity.
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Poisson by exponential gaps for small means, normal rounding for large.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 5000.0) {
      std::uint64_t k = 0;
      double acc = exponential(1.0);
      while (acc <= mean) {
        ++k;
        acc += exponential(1.0);
      }
      return k;
    }
    const double v = mean + std::sqrt(mean) * normal();
    return v <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(v));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

} // namespace opo
