#pragma once

#include <array>
#include <cstdint>

namespace sqzmag::rng {

/// Philox 4x32, 10 rounds.  Counter-based: the value at (seed, index,
/// stream) is a pure function of its arguments, so any partition of an
/// index range across workers reproduces the same samples.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed,
                                        std::uint64_t index,
                                        std::uint32_t stream);

/// Raw block for a full counter and key; the (seed, index, stream) wrapper
/// above covers normal use.  Exposed so the published test vectors can be
/// checked directly.
std::array<std::uint32_t, 4> philox4x32_block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key);

/// Uniform double in (0, 1] built from 53 bits of two words.  Never zero,
/// so it is safe under a logarithm.
double uniform53(std::uint32_t hi, std::uint32_t lo);

struct GaussPair {
  double z0;
  double z1;
};

/// Two independent standard normal deviates for a counter position,
/// via Box-Muller on one Philox block.
GaussPair gauss_pair(std::uint64_t seed, std::uint64_t index,
                     std::uint32_t stream);

/// Stream ids reserved by the trace synthesizer.
inline constexpr std::uint32_t kStreamQuantum = 0;
inline constexpr std::uint32_t kStreamClassical = 1;

} // namespace sqzmag::rng
