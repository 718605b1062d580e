#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>

#include "lassoscreen/core.hpp"

namespace lassoscreen {

/// Thrown when an operation requires a nonempty region but the region is
/// provably empty (ball and half-space do not intersect).
struct EmptyRegionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed ball { u : ||u - center|| <= radius }.
struct Sphere {
  Vector center;
  double radius = 0.0;
};

/// Closed half-space { u : <normal, u> <= offset }. A zero normal denotes the
/// whole space when offset >= 0 and the empty set otherwise.
struct HalfSpace {
  Vector normal;
  double offset = 0.0;
};

/// Intersection of a ball with a half-space.
struct Dome {
  Sphere ball;
  HalfSpace cut;
};

/// A region guaranteed to contain the dual optimum.
using SafeRegion = std::variant<Sphere, Dome>;

namespace detail {

// Tolerance on cosine-scale quantities: a cut whose normalized signed distance
// falls below -1 by more than this is treated as genuinely empty rather than
// as a rounding artifact of a region that just touches the ball.
inline constexpr double kCosineSlack = 1e-9;

// Relative margin for the screening comparison sup |<a, u>| < lambda. An atom
// active at the optimum can have an exact supremum of precisely lambda (the
// half-space of a dome is tight on the current support), and equality must
// never screen. The computed supremum carries rounding error up to roughly
// sqrt(eps) times the ball reach (the sqrt(1 - psi^2) terms amplify error near
// |psi| = 1), so the test demands a clearance proportional to lambda plus the
// ball reach before it may fire.
inline constexpr double kScreeningSlack = 1e-7;

// The screening test with its numerical clearance: true when `sup` is far
// enough below lambda that no rounding of `sup` can have hidden a touching or
// crossing supremum. `reach` is the ball radius times the atom norm, the scale
// of the terms whose cancellation produces the error.
inline bool screening_margin_ok(double sup, double lambda, double reach) {
  return sup < lambda - kScreeningSlack * (lambda + reach);
}

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// Membership test for the degenerate single-point ball {c}: the half-space
// must contain c up to a relative rounding allowance.
inline bool singleton_in_halfspace(const Dome& d) {
  const double gc = d.cut.normal.dot(d.ball.center);
  const double slack = 1e-12 * std::max({1.0, std::abs(gc), std::abs(d.cut.offset)});
  return gc <= d.cut.offset + slack;
}

// Signed distance from the ball center to the cut boundary, normalized by the
// ball radius (so it lives on the cosine scale). Requires r > 0, ||g|| > 0.
inline double dome_cut_cosine(const Dome& d) {
  return (d.cut.offset - d.cut.normal.dot(d.ball.center)) /
         (d.ball.radius * d.cut.normal.norm());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Region constructors
// ---------------------------------------------------------------------------

/// Ball centered at the dual point u with radius sqrt(2 * gap). Contains the
/// dual optimum because the optimum lies within sqrt(2 * gap) of any feasible
/// dual point whose gap against some primal point is `gap`.
inline Sphere gap_sphere_at(const Vector& u, double gap) {
  return Sphere{u, std::sqrt(2.0 * std::max(gap, 0.0))};
}

/// Dome refinement of the gap ball: ball centered at the midpoint of y and u
/// with radius ||y - u|| / 2, cut by the half-space whose normal points from
/// the midpoint toward y with offset <g, c> + gap - r^2.
inline Dome gap_dome_at(const Vector& y, const Vector& u, double gap) {
  Vector c = 0.5 * (y + u);
  const double r = 0.5 * (y - u).norm();
  Vector g = y - c;
  const double offset = g.dot(c) + gap - r * r;
  return Dome{Sphere{std::move(c), r}, HalfSpace{std::move(g), offset}};
}

/// Dome with the same ball as the gap dome but cut by the conjugate-feasible
/// half-space { u : <A x, u> <= lambda * ||x||_1 }, which contains the dual
/// optimum for every primal point x.
inline Dome holder_dome_at(const Vector& y, const Vector& u, Vector Ax, double lambda_l1) {
  Vector c = 0.5 * (y + u);
  const double r = 0.5 * (y - u).norm();
  return Dome{Sphere{std::move(c), r}, HalfSpace{std::move(Ax), lambda_l1}};
}

/// Validated wrapper: gap ball for a primal/dual pair of `p`.
inline Sphere gap_sphere(const LassoProblem& p, const Vector& x, const Vector& u) {
  return gap_sphere_at(u, duality_gap(p, x, u));
}

/// Validated wrapper: gap dome for a primal/dual pair of `p`.
inline Dome gap_dome(const LassoProblem& p, const Vector& x, const Vector& u) {
  return gap_dome_at(p.y, u, duality_gap(p, x, u));
}

/// Half-space { u : <A x, u> <= lambda * ||x||_1 } induced by a primal point.
/// Every dual feasible point satisfies it, hence so does the dual optimum.
inline HalfSpace cutting_halfspace(const LassoProblem& p, const Vector& x) {
  detail::require(x.size() == p.n(), "cutting_halfspace: coefficient length must equal atom count");
  return HalfSpace{p.A * x, p.lambda * x.lpNorm<1>()};
}

/// Validated wrapper: ball of the gap dome cut by the primal half-space.
inline Dome holder_dome(const LassoProblem& p, const Vector& x, const Vector& u) {
  duality_gap(p, x, u);  // validates feasibility and dimensions
  return holder_dome_at(p.y, u, p.A * x, p.lambda * x.lpNorm<1>());
}

// ---------------------------------------------------------------------------
// Support functions
// ---------------------------------------------------------------------------

/// max over the ball of <a, u>  =  <a, c> + r ||a||.
inline double sphere_sup_inner(const Sphere& s, const Vector& a) {
  return a.dot(s.center) + s.radius * a.norm();
}

/// max over the ball of |<a, u>|  =  |<a, c>| + r ||a||.
inline double sphere_sup_abs_inner(const Sphere& s, const Vector& a) {
  return std::abs(a.dot(s.center)) + s.radius * a.norm();
}

/// max over the dome of <a, u> in closed form. With psi1 the cosine between a
/// and the cut normal and psi2 the normalized signed distance of the cut from
/// the center, the maximum is <a, c> + r ||a|| when the ball's maximizer in
/// direction a survives the cut (psi1 <= psi2) and otherwise lies on the rim:
/// <a, c> + r ||a|| (psi1 psi2 + sqrt(1 - psi1^2) sqrt(1 - psi2^2)).
inline double dome_sup_inner(const Dome& d, const Vector& a) {
  const double anorm = a.norm();
  detail::require(anorm > 0.0, "dome_sup_inner: direction must be nonzero");
  const double gnorm = d.cut.normal.norm();
  if (gnorm == 0.0) {
    if (d.cut.offset < 0.0) throw EmptyRegionError("dome_sup_inner: empty region");
    return sphere_sup_inner(d.ball, a);
  }
  if (d.ball.radius == 0.0) {
    if (!detail::singleton_in_halfspace(d)) throw EmptyRegionError("dome_sup_inner: empty region");
    return a.dot(d.ball.center);
  }
  const double psi2_raw = detail::dome_cut_cosine(d);
  if (psi2_raw < -1.0 - detail::kCosineSlack)
    throw EmptyRegionError("dome_sup_inner: empty region");
  const double psi2 = detail::clamp_unit(psi2_raw);
  const double psi1 = detail::clamp_unit(a.dot(d.cut.normal) / (anorm * gnorm));
  double factor = 1.0;
  if (psi1 > psi2) {
    factor = psi1 * psi2 + std::sqrt(std::max(0.0, 1.0 - psi1 * psi1)) *
                               std::sqrt(std::max(0.0, 1.0 - psi2 * psi2));
  }
  return a.dot(d.ball.center) + d.ball.radius * anorm * factor;
}

/// max over the dome of |<a, u>| = max of the directional suprema at a and -a.
inline double dome_sup_abs_inner(const Dome& d, const Vector& a) {
  return std::max(dome_sup_inner(d, a), dome_sup_inner(d, Vector(-a)));
}

/// Directional supremum of |<a, u>| over any safe region.
inline double region_sup_abs_inner(const SafeRegion& region, const Vector& a) {
  if (const Sphere* s = std::get_if<Sphere>(&region)) return sphere_sup_abs_inner(*s, a);
  return dome_sup_abs_inner(std::get<Dome>(region), a);
}

// ---------------------------------------------------------------------------
// Membership, radius, witness
// ---------------------------------------------------------------------------

/// Whether u lies in the region, with an absolute tolerance on both the ball
/// inequality and the cut inequality.
inline bool region_contains(const SafeRegion& region, const Vector& u, double tol = 0.0) {
  detail::require(std::isfinite(tol) && tol >= 0.0, "region_contains: tol must be nonnegative");
  if (const Sphere* s = std::get_if<Sphere>(&region)) {
    detail::require(u.size() == s->center.size(), "region_contains: dimension mismatch");
    return (u - s->center).norm() <= s->radius + tol;
  }
  const Dome& d = std::get<Dome>(region);
  detail::require(u.size() == d.ball.center.size(), "region_contains: dimension mismatch");
  return (u - d.ball.center).norm() <= d.ball.radius + tol &&
         d.cut.normal.dot(u) <= d.cut.offset + tol;
}

/// Half-diameter of the region: its radius for a ball; for a dome, r if the
/// cut keeps the center side of the ball and sqrt(r^2 - dist^2) when the cut
/// plane at signed distance dist < 0 shaves past the center. Throws
/// EmptyRegionError for provably empty domes. Domes require ambient
/// dimension >= 2 (the rim circle degenerates in dimension 1).
inline double region_radius(const SafeRegion& region) {
  if (const Sphere* s = std::get_if<Sphere>(&region)) return s->radius;
  const Dome& d = std::get<Dome>(region);
  detail::require(d.ball.center.size() >= 2, "region_radius: dome requires ambient dimension >= 2");
  const double r = d.ball.radius;
  const double gnorm = d.cut.normal.norm();
  if (gnorm == 0.0) {
    if (d.cut.offset < 0.0) throw EmptyRegionError("region_radius: empty region");
    return r;
  }
  if (r == 0.0) {
    if (!detail::singleton_in_halfspace(d)) throw EmptyRegionError("region_radius: empty region");
    return 0.0;
  }
  const double t = detail::dome_cut_cosine(d);
  if (t >= 0.0) return r;
  if (t < -1.0 - detail::kCosineSlack) throw EmptyRegionError("region_radius: empty region");
  const double tc = detail::clamp_unit(t);
  return r * std::sqrt(std::max(0.0, (1.0 - tc) * (1.0 + tc)));
}

/// A point contained in the gap dome of (x, u) but strictly outside the
/// half-space <A x, u0> <= lambda ||x||_1 whenever the pair is not optimal and
/// x improves on the zero vector:
///   u0 = c + (gap - r^2) / r^2 * (y - c),  c = (y + u)/2,  r = ||y - u||/2.
/// Requires u != y so that r > 0.
inline Vector strict_inclusion_witness(const LassoProblem& p, const Vector& x, const Vector& u) {
  const double gap = duality_gap(p, x, u);
  const Vector c = 0.5 * (p.y + u);
  const double r = 0.5 * (p.y - u).norm();
  detail::require(r > 0.0, "strict_inclusion_witness: requires u != y");
  return c + ((gap - r * r) / (r * r)) * (p.y - c);
}

}  // namespace lassoscreen
