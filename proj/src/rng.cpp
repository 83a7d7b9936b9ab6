#include "hpsurf/rng.hpp"

#include <cmath>
#include <numbers>

namespace hpsurf {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void round(PhiloxCounter& c, const PhiloxKey& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    round(ctr, key);
  }
  return ctr;
}

std::array<std::uint64_t, 2> CounterRng::bits(std::uint64_t index, std::uint32_t lane) const {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), lane,
                          stream_};
  const PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = philox4x32(ctr, key);
  return {(static_cast<std::uint64_t>(out[0]) << 32) | out[1], (static_cast<std::uint64_t>(out[2]) << 32) | out[3]};
}

std::array<double, 2> CounterRng::uniform2(std::uint64_t index, std::uint32_t lane) const {
  const auto b = bits(index, lane);
  return {to_open_unit(b[0]), to_open_unit(b[1])};
}

double CounterRng::normal(std::uint64_t index, std::uint32_t lane) const {
  const auto u = uniform2(index, lane);
  return std::sqrt(-2.0 * std::log(u[0])) * std::cos(2.0 * std::numbers::pi * u[1]);
}

std::uint64_t CounterRng::below(std::uint64_t bound, std::uint64_t index, std::uint32_t lane) const {
  const std::uint64_t x = bits(index, lane)[0];
  // High 64 bits of x * bound.
  const std::uint64_t xl = x & 0xffffffffULL, xh = x >> 32;
  const std::uint64_t bl = bound & 0xffffffffULL, bh = bound >> 32;
  const std::uint64_t ll = xl * bl, lh = xl * bh, hl = xh * bl, hh = xh * bh;
  const std::uint64_t mid = (ll >> 32) + (lh & 0xffffffffULL) + (hl & 0xffffffffULL);
  return hh + (lh >> 32) + (hl >> 32) + (mid >> 32);
}

CounterRng CounterRng::derive(std::uint64_t salt) const {
  return CounterRng(mix64(seed_ ^ mix64(salt + 0x632BE59BD9B4E019ULL)), stream_);
}

}  // namespace hpsurf
