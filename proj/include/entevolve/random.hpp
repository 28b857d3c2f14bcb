#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace entevolve {

// SplitMix64 finalizer; decorrelates nearby (seed, stream) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the stream-th independent generator derived from `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Standard complex normal: real and imaginary parts N(0, 1/2).
  std::complex<double> complex_normal() {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {re * kHalfRoot, im * kHalfRoot};
  }

  double uniform() { return uniform_(engine_); }

  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static constexpr double kHalfRoot = 0.70710678118654752440;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace entevolve
