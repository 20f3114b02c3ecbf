#pragma once

#include <cstdint>
#include <random>

namespace skincal {

/// Deterministic stream keyed by (seed, tag, a, b).
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a = 0,
                                   std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag),  static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

/// Uniform draw on [lo, hi] with 53 random bits, independent of the
/// standard library's distribution implementation.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace skincal
