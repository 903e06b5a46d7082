// Deterministic, platform-independent random and quasi-random sources.
#pragma once

#include <array>
#include <cstdint>

namespace upress {

/// splitmix64: tiny deterministic generator; identical streams on every platform.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

/// Low-discrepancy Kronecker sequence (R_d) with a seeded toral shift.
/// Used for base-point selection: well spread, reproducible from the seed.
inline std::array<double, 3> quasi_random_point(std::uint64_t seed, int index, int dim) {
  // Generalized golden-ratio increments for d = 2 and d = 3.
  static constexpr std::array<double, 2> kAlpha2 = {0.7548776662466927, 0.5698402909980532};
  static constexpr std::array<double, 3> kAlpha3 = {0.8191725133961645, 0.6710436067037893,
                                                    0.5497004779019703};
  SplitMix64 rng(seed);
  std::array<double, 3> p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) {
    double shift = rng.next_unit();
    double alpha = (dim == 2) ? kAlpha2[static_cast<std::size_t>(k)]
                              : kAlpha3[static_cast<std::size_t>(k)];
    double v = shift + (index + 1) * alpha;
    p[static_cast<std::size_t>(k)] = v - static_cast<long long>(v);
  }
  return p;
}

}  // namespace upress
