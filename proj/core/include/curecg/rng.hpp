#pragma once

// Reproducible random numbers for simulation, bootstrap and residual
// randomization.  The generator is SplitMix64 (Steele, Lea & Flood 2014); each
// (seed, stream, substream) triple hashes to an independent starting state, so
// per-replication and per-subject streams can be consumed in any order or in
// parallel and still give the same numbers.  Uniforms and exponentials are
// derived from the raw 64-bit output here rather than through <random>
// distributions, whose algorithms differ between standard libraries.

#include <cstddef>
#include <cstdint>
#include <limits>

namespace curecg {

struct SimSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  // Independent generator for (seed, stream, substream).
  static SplitMix64 for_substream(const SimSeed& seed, std::uint64_t substream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) noexcept;
  // Uniform integer in [0, n), n > 0, without modulo bias.
  std::size_t below(std::size_t n) noexcept;

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

}  // namespace curecg
