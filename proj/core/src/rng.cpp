#include "curecg/rng.hpp"

#include <cmath>

namespace curecg {

SplitMix64 SplitMix64::for_substream(const SimSeed& seed, std::uint64_t substream) noexcept {
  std::uint64_t h = mix64(seed.seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ mix64(seed.stream + 0xbb67ae8584caa73bULL));
  h = mix64(h ^ mix64(substream + 0x3c6ef372fe94f82bULL));
  return SplitMix64(h);
}

double SplitMix64::uniform() noexcept {
  // (k + 0.5) / 2^53 for k in [0, 2^53)
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitMix64::exponential(double rate) noexcept {
  return -std::log(uniform()) / rate;
}

std::size_t SplitMix64::below(std::size_t n) noexcept {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return static_cast<std::size_t>(r % bound);
  }
}

}  // namespace curecg
