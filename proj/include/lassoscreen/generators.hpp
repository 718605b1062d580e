#pragma once

#include <cmath>
#include <cstdint>

#include "lassoscreen/core.hpp"
#include "lassoscreen/random.hpp"

namespace lassoscreen {

/// Dictionary with i.i.d. standard normal entries and unit-normalized columns.
/// Entries are drawn column by column so the layout of the stream is fixed.
inline Matrix gaussian_dictionary(Index m, Index n, std::uint64_t seed) {
  detail::require(m >= 1 && n >= 1, "gaussian_dictionary: dimensions must be positive");
  Rng rng(seed);
  Matrix A(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) A(i, j) = rng.normal();
  for (Index j = 0; j < n; ++j) {
    const double norm = A.col(j).norm();
    detail::require(norm > 0.0, "gaussian_dictionary: drew a zero column");
    A.col(j) /= norm;
  }
  return A;
}

/// Convolutional-style dictionary: column j is a Gaussian bump sampled on the
/// grid 1..m, centered at c_j = 1 + (j)(m-1)/(n-1) for j = 0..n-1 (the centers
/// sweep [1, m] uniformly; a single column is centered mid-grid), with width
/// sigma and unit-normalized columns. The seed is accepted for interface
/// parity with the other generators but unused: the construction is
/// deterministic.
inline Matrix toeplitz_dictionary(Index m, Index n, double sigma, std::uint64_t seed = 0) {
  (void)seed;
  detail::require(m >= 1 && n >= 1, "toeplitz_dictionary: dimensions must be positive");
  detail::require(std::isfinite(sigma) && sigma > 0.0, "toeplitz_dictionary: sigma must be positive");
  Matrix A(m, n);
  for (Index j = 0; j < n; ++j) {
    const double center =
        n > 1 ? 1.0 + static_cast<double>(j) * static_cast<double>(m - 1) / static_cast<double>(n - 1)
              : 0.5 * static_cast<double>(m + 1);
    for (Index i = 0; i < m; ++i) {
      const double t = (static_cast<double>(i + 1) - center) / sigma;
      A(i, j) = std::exp(-0.5 * t * t);
    }
    const double norm = A.col(j).norm();
    detail::require(norm > 0.0, "toeplitz_dictionary: column underflowed to zero");
    A.col(j) /= norm;
  }
  return A;
}

/// Observation drawn uniformly on the unit sphere (normalized Gaussian).
inline Vector unit_sphere_observation(Index m, std::uint64_t seed) {
  detail::require(m >= 1, "unit_sphere_observation: dimension must be positive");
  Rng rng(seed);
  Vector y(m);
  double norm = 0.0;
  // A zero draw has probability zero but would poison the normalization;
  // redraw deterministically from the same stream if it ever happens.
  do {
    for (Index i = 0; i < m; ++i) y[i] = rng.normal();
    norm = y.norm();
  } while (norm == 0.0);
  return y / norm;
}

}  // namespace lassoscreen
