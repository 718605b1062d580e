#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lassoscreen {

/// splitmix64 step: advances the state and returns the next 64-bit word.
/// Used to derive independent sub-seeds from a single master seed so that
/// per-trial streams stay decorrelated even for adjacent seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream. Draws come from mt19937_64 and are converted
/// with fixed arithmetic (no std::distribution objects, whose output is
/// implementation-defined), so sequences are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a logarithm argument.
  double uniform01_open_low() { return 1.0 - uniform01(); }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via the Box-Muller transform (one spare value cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Raw 64-bit draw.
  std::uint64_t next_u64() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derive the k-th sub-seed of a base seed (k = 0, 1, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
  std::uint64_t state = base;
  std::uint64_t out = 0;
  for (std::uint64_t i = 0; i <= k; ++i) out = splitmix64(state);
  return out;
}

}  // namespace lassoscreen
