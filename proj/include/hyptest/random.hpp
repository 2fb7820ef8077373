#ifndef HYPTEST_RANDOM_HPP
#define HYPTEST_RANDOM_HPP

// Reproducible random streams.
//
// Every stream is a std::mt19937_64 engine seeded through std::seed_seq with
// the 32-bit words of (seed, stream, chunk). Both the engine and the seed_seq
// mixing algorithm are fully specified by the C++ standard, so the raw 64-bit
// outputs are identical on every conforming platform. Conversions to
// uniform/normal variates are done here rather than through the
// implementation-defined <random> distributions:
//
//   uniform01  = (x >> 11) * 2^-53            in [0, 1)
//   normal     = Box-Muller on (1 - u1, u2)   (one variate per pair)
//
// Normal variates go through std::log/std::cos, so the last bit may differ
// between libm implementations; categorical draws are bit-exact.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hyptest::rng {

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0,
                          std::uint64_t chunk = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(chunk),
                    static_cast<std::uint32_t>(chunk >> 32)};
  return Engine(seq);
}

inline double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double standard_normal(Engine& engine) {
  const double u1 = 1.0 - uniform01(engine);  // (0, 1]
  const double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace hyptest::rng

#endif  // HYPTEST_RANDOM_HPP
