#pragma once

#include <cstdint>
#include <random>

namespace qspec {

/// Bumped whenever the mapping from (seed, index) to variates changes.
inline constexpr std::uint32_t kStreamVersion = 1;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` in `domain` derived from a master seed. Domains keep
/// e.g. coverage replications and truth batches from sharing streams.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t domain = 0) noexcept {
  return mix64(mix64(mix64(master) ^ index) ^ (domain * 0xd1b54a32d192ed03ULL));
}

/// A reproducible variate stream: 64-bit Mersenne Twister (std::mt19937_64,
/// whose output sequence is fixed by the C++ standard) seeded with one word.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  /// Standard normal by inversion of uniform().
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace qspec
