#pragma once

#include <array>
#include <cstdint>

namespace hpsurf {

/// Philox4x32-10 block function (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

/// Counter-based generator: every (index, lane) pair maps to a fixed block of
/// random bits, so draw i never depends on how many draws were made before it.
/// Streams separate independent uses that share a seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint32_t stream = 0) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream() const { return stream_; }

  /// Two independent 64-bit words for (index, lane).
  std::array<std::uint64_t, 2> bits(std::uint64_t index, std::uint32_t lane = 0) const;

  /// Two uniforms in the open interval (0, 1).
  std::array<double, 2> uniform2(std::uint64_t index, std::uint32_t lane = 0) const;

  double uniform(std::uint64_t index, std::uint32_t lane = 0) const { return uniform2(index, lane)[0]; }

  /// Standard normal via Box-Muller on the lane's two uniforms.
  double normal(std::uint64_t index, std::uint32_t lane = 0) const;

  /// Uniform integer in [0, bound) (bound > 0), nearly unbiased via 128-bit multiply.
  std::uint64_t below(std::uint64_t bound, std::uint64_t index, std::uint32_t lane = 0) const;

  /// Child generator for a derived stream (e.g. one per replication).
  CounterRng derive(std::uint64_t salt) const;

 private:
  std::uint64_t seed_;
  std::uint32_t stream_;
};

/// Maps 53 high bits to (0, 1), never returning 0 or 1.
inline double to_open_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

/// SplitMix64 finalizer; used to spread seeds for derived streams.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace hpsurf
