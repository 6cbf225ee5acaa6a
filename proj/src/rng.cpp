#include "sqzmag/rng.hpp"

#include <cmath>
#include <numbers>

namespace sqzmag::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

struct Key {
  std::uint32_t k0;
  std::uint32_t k1;
};

inline void round_once(std::array<std::uint32_t, 4>& c, const Key& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ key.k0, lo1, hi0 ^ c[3] ^ key.k1, lo0};
}

} // namespace

std::array<std::uint32_t, 4> philox4x32_block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key_words) {
  Key key{key_words[0], key_words[1]};
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key.k0 += kWeyl0;
      key.k1 += kWeyl1;
    }
    round_once(counter, key);
  }
  return counter;
}

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed,
                                        std::uint64_t index,
                                        std::uint32_t stream) {
  return philox4x32_block(
      {
          static_cast<std::uint32_t>(index),
          static_cast<std::uint32_t>(index >> 32),
          stream,
          0u,
      },
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
}

double uniform53(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

GaussPair gauss_pair(std::uint64_t seed, std::uint64_t index,
                     std::uint32_t stream) {
  const auto b = philox4x32(seed, index, stream);
  const double u1 = uniform53(b[0], b[1]);
  const double u2 = uniform53(b[2], b[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

} // namespace sqzmag::rng
