#pragma once

#include <numeric>
#include <vector>

#include "lassoscreen/core.hpp"
#include "lassoscreen/regions.hpp"

namespace lassoscreen {

/// Bookkeeping for which atoms are still candidates for the solution support.
/// `alive` holds original column indices in strictly increasing order; atoms
/// ever removed stay removed.
struct ScreeningState {
  std::vector<Index> alive;
  Index original_n = 0;

  static ScreeningState full(Index n) {
    detail::require(n >= 0, "ScreeningState: negative atom count");
    ScreeningState st;
    st.original_n = n;
    st.alive.resize(static_cast<std::size_t>(n));
    std::iota(st.alive.begin(), st.alive.end(), Index{0});
    return st;
  }

  Index alive_count() const { return static_cast<Index>(alive.size()); }
  Index screened_count() const { return original_n - alive_count(); }
};

/// Whether the atom can be removed: the largest |<a, u>| over the safe region
/// stays strictly below lambda, which forces the optimal coefficient of `a`
/// to zero. Strictness matters: at exactly lambda the atom may be active, so
/// the comparison demands a rounding-proof clearance below lambda (see
/// detail::screening_margin_ok) rather than a bare floating-point `<`.
inline bool screen_atom(const SafeRegion& region, const Vector& a, double lambda) {
  detail::require(std::isfinite(lambda) && lambda > 0.0, "screen_atom: lambda must be positive");
  const double anorm = a.norm();
  detail::require(anorm > 0.0, "screen_atom: atom must be nonzero");
  const double ball_radius = std::holds_alternative<Sphere>(region)
                                 ? std::get<Sphere>(region).radius
                                 : std::get<Dome>(region).ball.radius;
  return detail::screening_margin_ok(region_sup_abs_inner(region, a), lambda,
                                     ball_radius * anorm);
}

/// Apply the screening test to every alive atom and return the surviving set.
/// Atoms absent from `st` stay absent regardless of the region.
inline ScreeningState screen_all(const LassoProblem& p, const SafeRegion& region,
                                 const ScreeningState& st) {
  detail::require(st.original_n == p.n(), "screen_all: state does not match problem size");
  ScreeningState out;
  out.original_n = st.original_n;
  out.alive.reserve(st.alive.size());
  for (Index j : st.alive) {
    detail::require(j >= 0 && j < p.n(), "screen_all: alive index out of range");
    if (!screen_atom(region, p.A.col(j), p.lambda)) out.alive.push_back(j);
  }
  return out;
}

/// Restriction of a problem to the alive atoms. When every atom has been
/// screened the restriction is empty and the original solution is exactly the
/// zero vector; `empty()` flags that case since the restricted dictionary has
/// no columns.
struct CompactProblem {
  Matrix A;
  Vector y;
  double lambda = 0.0;
  std::vector<Index> index_map;  // restricted column j came from index_map[j]

  bool empty() const { return A.cols() == 0; }
};

inline CompactProblem compact_problem(const LassoProblem& p, const ScreeningState& st) {
  detail::require(st.original_n == p.n(), "compact_problem: state does not match problem size");
  CompactProblem out;
  out.y = p.y;
  out.lambda = p.lambda;
  out.index_map = st.alive;
  out.A.resize(p.m(), st.alive_count());
  for (Index j = 0; j < st.alive_count(); ++j) out.A.col(j) = p.A.col(st.alive[static_cast<std::size_t>(j)]);
  return out;
}

/// Zero-pad a solution of the restricted problem back to the original
/// coordinates. Screened coordinates are zero in every original solution, so
/// this reproduces a solution of the original problem.
inline Vector expand_solution(const Vector& x_restricted, const std::vector<Index>& index_map,
                              Index original_n) {
  detail::require(x_restricted.size() == static_cast<Index>(index_map.size()),
                  "expand_solution: size mismatch");
  Vector x = Vector::Zero(original_n);
  for (Index j = 0; j < x_restricted.size(); ++j) {
    const Index orig = index_map[static_cast<std::size_t>(j)];
    detail::require(orig >= 0 && orig < original_n, "expand_solution: index out of range");
    x[orig] = x_restricted[j];
  }
  return x;
}

}  // namespace lassoscreen
