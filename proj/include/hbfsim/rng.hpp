// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace hbfsim {

// splitmix64 finalizer; decorrelates derived stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xD6E8FEB86659FD93ULL + 1));
}

/// Deterministic random source. All distributions are generated from raw
/// mt19937_64 words with fixed draw counts, so a given seed always yields the
/// same sequence on every platform. Independent substreams are derived by
/// hashing (seed, stream id); each module/UE gets its own substream so that
/// draw interleaving never depends on scheduling or configuration.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  Rng substream(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

  std::uint64_t seed() const { return seed_; }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two words.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kTwoPi_ * 0.5 * u2);
  }

  // Circularly symmetric complex Gaussian CN(0, 1); E|z|^2 = 1.
  std::complex<double> cgauss() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-std::log(u1));
    return {r * std::cos(kTwoPi_ * u2), r * std::sin(kTwoPi_ * u2)};
  }

  double exponential(double mean) {
    double u = uniform();
    if (u >= 1.0) u = 1.0 - 0x1.0p-53;
    return -mean * std::log1p(-u);
  }

  // Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t integer(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen_()) * bound) >> 64);
  }

 private:
  static constexpr double kTwoPi_ = 6.283185307179586476925286766559;
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace hbfsim
