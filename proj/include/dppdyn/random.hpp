#ifndef DPPDYN_RANDOM_HPP
#define DPPDYN_RANDOM_HPP

#include <cstdint>
#include <random>

namespace dppdyn {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; mix64(0) == 0.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `index` derived from `master`: master XOR mix64(index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return master ^ mix64(index);
}

/// Uniform on [0, 1) with 53 random bits, independent of the standard
/// library's distribution implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1].
inline double uniform01_open_left(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace dppdyn

#endif  // DPPDYN_RANDOM_HPP
