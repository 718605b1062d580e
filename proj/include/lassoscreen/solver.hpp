#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "lassoscreen/core.hpp"
#include "lassoscreen/flops.hpp"
#include "lassoscreen/random.hpp"
#include "lassoscreen/regions.hpp"
#include "lassoscreen/screening.hpp"

namespace lassoscreen {

enum class RegionKind { none, gap_sphere, gap_dome, holder_dome };

inline std::string to_string(RegionKind k) {
  switch (k) {
    case RegionKind::none: return "none";
    case RegionKind::gap_sphere: return "gap_sphere";
    case RegionKind::gap_dome: return "gap_dome";
    case RegionKind::holder_dome: return "holder_dome";
  }
  throw std::invalid_argument("to_string: unknown region kind");
}

inline RegionKind region_kind_from_string(const std::string& s) {
  if (s == "none") return RegionKind::none;
  if (s == "gap_sphere") return RegionKind::gap_sphere;
  if (s == "gap_dome") return RegionKind::gap_dome;
  if (s == "holder_dome") return RegionKind::holder_dome;
  throw std::invalid_argument("region_kind_from_string: unknown region kind '" + s + "'");
}

struct SolverConfig {
  RegionKind region_kind = RegionKind::none;
  std::uint64_t flop_budget = 0;  // 0 = unlimited
  double gap_tolerance = 0.0;
  int max_iterations = 100000;
  int screen_every = 1;
  bool record_trace = true;    // keep per-iteration entries in the result
  bool record_events = false;  // additionally log every charged FLOP event

  // max_iterations >= 1 is required, so at least one stopping rule is always
  // active even with an unlimited budget and a zero-unreachable tolerance.
  void validate() const {
    detail::require(std::isfinite(gap_tolerance) && gap_tolerance >= 0.0,
                    "SolverConfig: gap_tolerance must be nonnegative");
    detail::require(max_iterations >= 1, "SolverConfig: max_iterations must be positive");
    detail::require(screen_every >= 1, "SolverConfig: screen_every must be positive");
  }
};

enum class TerminationReason { gap_tolerance, flop_budget, max_iterations };

inline std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::gap_tolerance: return "gap_tolerance";
    case TerminationReason::flop_budget: return "flop_budget";
    case TerminationReason::max_iterations: return "max_iterations";
  }
  throw std::invalid_argument("to_string: unknown termination reason");
}

struct TraceEntry {
  int iteration = 0;
  double gap = 0.0;
  Index alive = 0;          // atoms still alive after this iteration's screening
  std::uint64_t flops = 0;  // cumulative
  double objective = 0.0;   // primal objective at the iterate
};

struct SolverTrace {
  std::vector<TraceEntry> entries;  // empty when record_trace is off
  Vector x;                         // final iterate, zero-padded to original n
  double final_gap = 0.0;
  TerminationReason termination_reason = TerminationReason::max_iterations;
  int iterations = 0;       // index of the iteration at which the run stopped
  std::uint64_t flops = 0;  // total charged FLOPs
  std::vector<Index> final_alive;               // surviving original indices
  std::vector<Index> screened_per_iteration;    // cumulative screened count, one per iteration
  std::vector<FlopEvent> events;                // populated when record_events
  Index nonzero_coefficient_drops = 0;  // screened atoms whose coefficient was not already zero
};

/// Everything an observer needs to rebuild the safe regions of the current
/// primal/dual pair: the Hölder dome's cut is (A x, lambda * ||x||_1) with
/// A x = y - residual. References are valid only during the callback.
struct IterationState {
  int iteration;
  double gap;
  double primal_value;
  double dual_value;
  double l1_norm;
  double lambda;
  const Vector& y;
  const Vector& u;
  const Vector& residual;
  Index alive_count;
};

using IterationObserver = std::function<void(const IterationState&)>;

/// Upper bound on ||A||_2^2 for the FISTA step size: power iteration on A^T A
/// (at most 50 rounds, stopping when the Rayleigh quotient moves by less than
/// a 1e-6 relative change), inflated by 1.01 so the bound stays a valid
/// majorization despite early stopping. Deterministic: fixed internal seed.
inline double estimate_lipschitz(const Matrix& A) {
  detail::require(A.rows() >= 1 && A.cols() >= 1, "estimate_lipschitz: matrix must be nonempty");
  const Index n = A.cols();
  Rng rng(0x1b57a7e5eedULL);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  double vnorm = v.norm();
  if (vnorm == 0.0) {
    v.setOnes();
    vnorm = v.norm();
  }
  v /= vnorm;
  double est = 0.0;
  double prev = -1.0;
  for (int it = 0; it < 50; ++it) {
    const Vector w = A * v;
    est = w.squaredNorm();  // Rayleigh quotient of A^T A at the unit vector v
    if (est == 0.0) {
      // v landed in the null space; restart from fresh deterministic draws
      for (Index i = 0; i < n; ++i) v[i] = rng.normal();
      const double nv = v.norm();
      if (nv == 0.0) break;
      v /= nv;
      prev = -1.0;
      continue;
    }
    Vector z = A.transpose() * w;
    const double zn = z.norm();
    if (zn == 0.0) break;
    v = z / zn;
    if (prev >= 0.0 && std::abs(est - prev) <= 1e-6 * est) break;
    prev = est;
  }
  if (est == 0.0) throw std::invalid_argument("estimate_lipschitz: zero dictionary");
  return 1.01 * est;
}

namespace detail {

// Per-solve working set: the dictionary restricted to alive atoms, kept as the
// left prefix of a fixed-size matrix so screening never reallocates.
struct SolverWorkspace {
  Matrix A;                  // columns 0..k-1 are the alive atoms
  std::vector<Index> alive;  // original index of each live column
  Vector colnorm;            // norms of the live columns
  Index k = 0;

  // Drop the columns flagged in fired[0..k-1]; companions (iterate, momentum
  // point, previous iterate) are compacted with the same permutation.
  // Returns the number of dropped columns.
  Index compact(const std::vector<char>& fired, Vector& x, Vector& xprev, Vector& w) {
    Index out = 0;
    for (Index j = 0; j < k; ++j) {
      if (fired[static_cast<std::size_t>(j)]) continue;
      if (out != j) {
        A.col(out) = A.col(j);
        alive[static_cast<std::size_t>(out)] = alive[static_cast<std::size_t>(j)];
        colnorm[out] = colnorm[j];
        x[out] = x[j];
        xprev[out] = xprev[j];
        w[out] = w[j];
      }
      ++out;
    }
    const Index dropped = k - out;
    k = out;
    alive.resize(static_cast<std::size_t>(out));
    return dropped;
  }
};

}  // namespace detail

/// FISTA with interleaved safe screening.
///
/// Each iteration evaluates the duality gap of the current iterate (via the
/// rescaled residual as the dual point), screens and physically compacts the
/// dictionary every cfg.screen_every iterations (including iteration 0),
/// records a trace entry, checks the stopping rules in the order
/// gap <= tolerance, FLOPs >= budget, iteration == max_iterations, and then
/// takes one accelerated proximal step: a gradient step at the momentum point
/// with step size 1/L followed by soft-thresholding at lambda/L, with the
/// classic t-sequence t' = (1 + sqrt(1 + 4 t^2)) / 2 and no restarts. The
/// traced objective is therefore not guaranteed monotone (acceleration can
/// produce small transient increases), but the duality gap of the iterate is
/// evaluated exactly at every iteration and drives the stopping rule.
///
/// FLOP accounting: every event listed in flops.hpp is charged where the
/// corresponding quantity is computed. The objective of the proximal candidate
/// (one residual plus two inner products) is charged to the iteration that
/// computes it; the cached value is reused by the next gap evaluation. The
/// Lipschitz estimate and the one-off column-norm precomputation are not
/// charged: both are shared verbatim by all solver variants, so they cancel
/// from any budgeted comparison.
inline SolverTrace fista_solve(const LassoProblem& p, const SolverConfig& cfg,
                               const IterationObserver& observer = {}) {
  cfg.validate();
  const Index m = p.m();
  const Index n0 = p.n();
  const double lambda = p.lambda;
  const Vector& y = p.y;

  detail::SolverWorkspace ws;
  ws.A = p.A;
  ws.k = n0;
  ws.alive.resize(static_cast<std::size_t>(n0));
  std::iota(ws.alive.begin(), ws.alive.end(), Index{0});
  ws.colnorm.resize(n0);
  for (Index j = 0; j < n0; ++j) {
    ws.colnorm[j] = ws.A.col(j).norm();
    detail::require(ws.colnorm[j] > 0.0, "fista_solve: dictionary contains a zero atom");
  }

  const double L = estimate_lipschitz(p.A);
  const double step = 1.0 / L;
  const double kappa = lambda / L;

  SolverTrace out;
  FlopCounter counter;
  if (cfg.record_events) counter.log = &out.events;

  // FISTA state, restricted to the live prefix of length ws.k.
  Vector x = Vector::Zero(n0), xprev = Vector::Zero(n0), w = Vector::Zero(n0);
  Vector z(n0), grad(n0), scores_c(n0), scores_g(n0);
  Vector rho_x = y, rho_w(m), rho_z(m), u(m);
  std::vector<char> fired(static_cast<std::size_t>(n0), 0);
  double t_mom = 1.0;

  const double ynorm2 = y.squaredNorm();
  counter.charge({FlopEventKind::inner_product, m, 0});
  double obj_x = 0.5 * ynorm2;  // objective at x = 0
  double l1_x = 0.0;

  double gap = obj_x;
  TerminationReason reason = TerminationReason::max_iterations;
  int t = 0;
  for (;; ++t) {
    // --- dual point and gap at the current iterate ---
    double corr = 0.0;
    if (ws.k > 0) {
      grad.head(ws.k).noalias() = ws.A.leftCols(ws.k).transpose() * rho_x;
      corr = grad.head(ws.k).cwiseAbs().maxCoeff();
    }
    const double scale = std::max(1.0, corr / lambda);
    u = rho_x / scale;
    counter.charge({FlopEventKind::dual_scaling, m, ws.k});
    const double dual_value = 0.5 * ynorm2 - 0.5 * (y - u).squaredNorm();
    counter.charge({FlopEventKind::inner_product, m, 0});
    gap = obj_x - dual_value;

    if (observer)
      observer(IterationState{t, gap, obj_x, dual_value, l1_x, lambda, y, u, rho_x, ws.k});

    // --- screening ---
    if (cfg.region_kind != RegionKind::none && t % cfg.screen_every == 0 && ws.k > 0) {
      counter.charge({FlopEventKind::region_construction, m, 0});
      bool any_fired = false;

      if (cfg.region_kind == RegionKind::gap_sphere) {
        const double r = std::sqrt(2.0 * std::max(gap, 0.0));
        scores_c.head(ws.k).noalias() = ws.A.leftCols(ws.k).transpose() * u;
        for (Index j = 0; j < ws.k; ++j) {
          counter.charge({FlopEventKind::sphere_screen_atom, m, 0});
          fired[static_cast<std::size_t>(j)] = detail::screening_margin_ok(
              std::abs(scores_c[j]) + r * ws.colnorm[j], lambda, r * ws.colnorm[j]);
          any_fired |= fired[static_cast<std::size_t>(j)] != 0;
        }
      } else {
        // Shared ball of both domes: center (y+u)/2, radius ||y-u||/2.
        const Vector center = 0.5 * (y + u);
        const double r = 0.5 * (y - u).norm();
        Vector g;
        double offset = 0.0;
        if (cfg.region_kind == RegionKind::gap_dome) {
          g = y - center;
          offset = g.dot(center) + gap - r * r;
        } else {  // holder_dome: cut <A x, u> <= lambda ||x||_1 with A x = y - rho
          g = y - rho_x;
          offset = lambda * l1_x;
        }
        counter.charge({FlopEventKind::dome_screen_setup, m, 0});
        const double gnorm = g.norm();

        if (gnorm == 0.0 || r == 0.0) {
          // Degenerate dome: a plain ball (zero normal) or the single point
          // {center}; either way the ball bound is the exact supremum.
          scores_c.head(ws.k).noalias() = ws.A.leftCols(ws.k).transpose() * center;
          for (Index j = 0; j < ws.k; ++j) {
            counter.charge({FlopEventKind::dome_screen_atom, m, 0});
            fired[static_cast<std::size_t>(j)] = detail::screening_margin_ok(
                std::abs(scores_c[j]) + r * ws.colnorm[j], lambda, r * ws.colnorm[j]);
            any_fired |= fired[static_cast<std::size_t>(j)] != 0;
          }
        } else {
          const double psi2 =
              detail::clamp_unit((offset - g.dot(center)) / (r * gnorm));
          const double sin2 = std::sqrt(std::max(0.0, 1.0 - psi2 * psi2));
          scores_c.head(ws.k).noalias() = ws.A.leftCols(ws.k).transpose() * center;
          scores_g.head(ws.k).noalias() = ws.A.leftCols(ws.k).transpose() * g;
          for (Index j = 0; j < ws.k; ++j) {
            counter.charge({FlopEventKind::dome_screen_atom, m, 0});
            const double psi1 = detail::clamp_unit(scores_g[j] / (ws.colnorm[j] * gnorm));
            const double sin1 = std::sqrt(std::max(0.0, 1.0 - psi1 * psi1));
            const double f_pos = psi1 <= psi2 ? 1.0 : psi1 * psi2 + sin1 * sin2;
            const double f_neg = -psi1 <= psi2 ? 1.0 : -psi1 * psi2 + sin1 * sin2;
            const double sup_abs = std::max(scores_c[j] + r * ws.colnorm[j] * f_pos,
                                            -scores_c[j] + r * ws.colnorm[j] * f_neg);
            fired[static_cast<std::size_t>(j)] =
                detail::screening_margin_ok(sup_abs, lambda, r * ws.colnorm[j]);
            any_fired |= fired[static_cast<std::size_t>(j)] != 0;
          }
        }
      }

      if (any_fired) {
        bool dropped_nonzero = false;
        for (Index j = 0; j < ws.k; ++j)
          if (fired[static_cast<std::size_t>(j)] && x[j] != 0.0) {
            dropped_nonzero = true;
            ++out.nonzero_coefficient_drops;
          }
        ws.compact(fired, x, xprev, w);
        if (dropped_nonzero) {
          // The cached residual belonged to the pre-compaction iterate; the
          // dropped coordinates are provably zero at the optimum but were not
          // yet zero in the iterate, so recompute (and charge) the objective.
          rho_x.noalias() = y - ws.A.leftCols(ws.k) * x.head(ws.k);
          counter.charge({FlopEventKind::residual, m, ws.k});
          l1_x = x.head(ws.k).cwiseAbs().sum();
          obj_x = 0.5 * rho_x.squaredNorm() + lambda * l1_x;
          counter.charge({FlopEventKind::inner_product, m, 0});
          counter.charge({FlopEventKind::inner_product, ws.k, 0});
        }
      }
    }

    out.screened_per_iteration.push_back(n0 - ws.k);
    if (cfg.record_trace) out.entries.push_back({t, gap, ws.k, counter.total, obj_x});

    // --- stopping rules ---
    if (gap <= cfg.gap_tolerance) {
      reason = TerminationReason::gap_tolerance;
      break;
    }
    if (cfg.flop_budget > 0 && counter.total >= cfg.flop_budget) {
      reason = TerminationReason::flop_budget;
      break;
    }
    if (t >= cfg.max_iterations) {
      reason = TerminationReason::max_iterations;
      break;
    }

    // --- accelerated proximal step ---
    rho_w.noalias() = y - ws.A.leftCols(ws.k) * w.head(ws.k);
    counter.charge({FlopEventKind::residual, m, ws.k});
    grad.head(ws.k).noalias() = ws.A.leftCols(ws.k).transpose() * rho_w;
    counter.charge({FlopEventKind::gradient, m, ws.k});
    for (Index j = 0; j < ws.k; ++j) {
      const double v = w[j] + step * grad[j];
      z[j] = v > kappa ? v - kappa : (v < -kappa ? v + kappa : 0.0);
    }
    counter.charge({FlopEventKind::prox, 0, ws.k});
    rho_z.noalias() = y - ws.A.leftCols(ws.k) * z.head(ws.k);
    counter.charge({FlopEventKind::residual, m, ws.k});
    l1_x = z.head(ws.k).cwiseAbs().sum();
    obj_x = 0.5 * rho_z.squaredNorm() + lambda * l1_x;
    counter.charge({FlopEventKind::inner_product, m, 0});
    counter.charge({FlopEventKind::inner_product, ws.k, 0});

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    // w = z + ((t-1)/t') (z - x_old)
    w.head(ws.k) = z.head(ws.k) + ((t_mom - 1.0) / t_next) * (z.head(ws.k) - x.head(ws.k));
    xprev.head(ws.k) = x.head(ws.k);
    x.head(ws.k) = z.head(ws.k);
    rho_x.swap(rho_z);
    counter.charge({FlopEventKind::momentum_update, 0, 0});
    t_mom = t_next;
  }

  out.x = Vector::Zero(n0);
  for (Index j = 0; j < ws.k; ++j) out.x[ws.alive[static_cast<std::size_t>(j)]] = x[j];
  out.final_gap = gap;
  out.termination_reason = reason;
  out.iterations = t;
  out.flops = counter.total;
  out.final_alive = ws.alive;
  return out;
}

}  // namespace lassoscreen
