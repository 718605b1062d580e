#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lassoscreen/core.hpp"
#include "lassoscreen/generators.hpp"
#include "lassoscreen/parallel.hpp"
#include "lassoscreen/random.hpp"
#include "lassoscreen/regions.hpp"
#include "lassoscreen/solver.hpp"

namespace lassoscreen {

enum class DictionaryKind { gaussian, toeplitz };

inline std::string to_string(DictionaryKind k) {
  switch (k) {
    case DictionaryKind::gaussian: return "gaussian";
    case DictionaryKind::toeplitz: return "toeplitz";
  }
  throw std::invalid_argument("to_string: unknown dictionary kind");
}

inline DictionaryKind dictionary_kind_from_string(const std::string& s) {
  if (s == "gaussian") return DictionaryKind::gaussian;
  if (s == "toeplitz") return DictionaryKind::toeplitz;
  throw std::invalid_argument("dictionary_kind_from_string: unknown dictionary kind '" + s + "'");
}

/// Shared knobs of both experiments. lambda values are specified as fractions
/// of lambda_max so instances stay comparable across random observations.
struct ExperimentConfig {
  Index m = 100;
  Index n = 500;
  DictionaryKind dictionary_kind = DictionaryKind::gaussian;
  std::vector<double> lambda_ratios = {0.3, 0.5, 0.8};
  int trials = 50;
  std::uint64_t seed = 0;
  std::vector<double> gap_checkpoints = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  std::uint64_t flop_budget = 0;   // benchmark budget; 0 = calibrate first
  double target_rho = 0.5;         // calibration target: fraction of solved instances
  double target_tau = 1e-7;        // ... at this gap threshold
  double toeplitz_sigma = 0.0;     // 0 = default m/50
  int max_iterations = 100000;
  int threads = 1;

  double sigma() const { return toeplitz_sigma > 0.0 ? toeplitz_sigma : static_cast<double>(m) / 50.0; }

  void validate() const {
    detail::require(m >= 1 && n >= 1, "ExperimentConfig: dimensions must be positive");
    detail::require(!lambda_ratios.empty(), "ExperimentConfig: lambda_ratios must be nonempty");
    for (double r : lambda_ratios)
      detail::require(std::isfinite(r) && r > 0.0 && r < 1.0,
                      "ExperimentConfig: lambda ratios must lie in (0,1)");
    detail::require(trials >= 1, "ExperimentConfig: trials must be positive");
    detail::require(!gap_checkpoints.empty(), "ExperimentConfig: gap_checkpoints must be nonempty");
    for (std::size_t i = 0; i < gap_checkpoints.size(); ++i) {
      detail::require(std::isfinite(gap_checkpoints[i]) && gap_checkpoints[i] > 0.0,
                      "ExperimentConfig: checkpoints must be positive");
      if (i > 0)
        detail::require(gap_checkpoints[i] < gap_checkpoints[i - 1],
                        "ExperimentConfig: checkpoints must be strictly decreasing");
    }
    detail::require(std::isfinite(toeplitz_sigma) && toeplitz_sigma >= 0.0,
                    "ExperimentConfig: toeplitz_sigma must be nonnegative");
    detail::require(max_iterations >= 1, "ExperimentConfig: max_iterations must be positive");
    detail::require(threads >= 1, "ExperimentConfig: threads must be positive");
  }
};

struct InstanceData {
  Matrix A;
  Vector y;
};

/// Instance for trial t: the trial streams are seeded with cfg.seed ^ t, with
/// dictionary and observation sub-seeds split off that value, so parallel and
/// sequential execution produce identical instances.
inline InstanceData make_instance(const ExperimentConfig& cfg, Index trial) {
  const std::uint64_t trial_seed = cfg.seed ^ static_cast<std::uint64_t>(trial);
  const std::uint64_t seed_dict = derive_seed(trial_seed, 0);
  const std::uint64_t seed_obs = derive_seed(trial_seed, 1);
  InstanceData out;
  out.A = cfg.dictionary_kind == DictionaryKind::gaussian
              ? gaussian_dictionary(cfg.m, cfg.n, seed_dict)
              : toeplitz_dictionary(cfg.m, cfg.n, cfg.sigma(), seed_dict);
  out.y = unit_sphere_observation(cfg.m, seed_obs);
  return out;
}

// ---------------------------------------------------------------------------
// Radius-ratio experiment
// ---------------------------------------------------------------------------

struct RadiusRatioCell {
  double lambda_ratio = 0.0;
  double gap_checkpoint = 0.0;
  double mean_ratio = std::numeric_limits<double>::quiet_NaN();  // NaN = missing
  int trials_counted = 0;
};

/// For every trial and lambda ratio, run the plain solver (no screening) and,
/// the first time the duality gap falls below each checkpoint, record the
/// ratio of dome half-diameters Radius(holder) / Radius(gap dome) at the
/// current primal/dual pair. Cells average recorded ratios across trials;
/// checkpoints a trial never reaches are left out of its cells (explicitly
/// missing, never imputed). Rows are ordered by (ratio index, checkpoint index).
inline std::vector<RadiusRatioCell> radius_ratio_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n_ratios = cfg.lambda_ratios.size();
  const std::size_t n_cp = cfg.gap_checkpoints.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> recorded(
      static_cast<std::size_t>(cfg.trials), std::vector<double>(n_ratios * n_cp, nan));

  parallel_for(cfg.threads, cfg.trials, [&](Index trial) {
    const InstanceData inst = make_instance(cfg, trial);
    const double lmax = (inst.A.transpose() * inst.y).lpNorm<Eigen::Infinity>();
    for (std::size_t ri = 0; ri < n_ratios; ++ri) {
      const LassoProblem p(inst.A, inst.y, cfg.lambda_ratios[ri] * lmax);
      SolverConfig scfg;
      scfg.region_kind = RegionKind::none;
      scfg.gap_tolerance = cfg.gap_checkpoints.back();
      scfg.max_iterations = cfg.max_iterations;
      scfg.record_trace = false;
      std::size_t ci = 0;
      auto observer = [&](const IterationState& st) {
        while (ci < n_cp && st.gap <= cfg.gap_checkpoints[ci]) {
          const Dome dome_gap = gap_dome_at(st.y, st.u, st.gap);
          const Dome dome_holder =
              holder_dome_at(st.y, st.u, st.y - st.residual, st.lambda * st.l1_norm);
          const double r_gap = region_radius(SafeRegion{dome_gap});
          const double r_holder = region_radius(SafeRegion{dome_holder});
          recorded[static_cast<std::size_t>(trial)][ri * n_cp + ci] =
              r_gap > 0.0 ? r_holder / r_gap : 1.0;
          ++ci;
        }
      };
      fista_solve(p, scfg, observer);
    }
  });

  std::vector<RadiusRatioCell> table;
  table.reserve(n_ratios * n_cp);
  for (std::size_t ri = 0; ri < n_ratios; ++ri) {
    for (std::size_t ci = 0; ci < n_cp; ++ci) {
      RadiusRatioCell cell;
      cell.lambda_ratio = cfg.lambda_ratios[ri];
      cell.gap_checkpoint = cfg.gap_checkpoints[ci];
      double sum = 0.0;
      int count = 0;
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const double v = recorded[static_cast<std::size_t>(trial)][ri * n_cp + ci];
        if (!std::isnan(v)) {
          sum += v;
          ++count;
        }
      }
      cell.trials_counted = count;
      if (count > 0) cell.mean_ratio = sum / count;
      table.push_back(cell);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// FLOP-budgeted benchmark
// ---------------------------------------------------------------------------

/// Budgeted runs stop early once the gap falls below this floor: every
/// reported threshold tau is far above it, so the recorded success/failure at
/// any tau of interest is unchanged while the solver avoids burning the rest
/// of its budget on sub-double-precision refinements.
inline constexpr double kBenchmarkGapFloor = 1e-14;

/// Fraction of instances whose final gap is <= tau.
inline double profile_rho(const std::vector<double>& gaps, double tau) {
  detail::require(!gaps.empty(), "profile_rho: empty gap list");
  const auto count = std::count_if(gaps.begin(), gaps.end(), [&](double g) { return g <= tau; });
  return static_cast<double>(count) / static_cast<double>(gaps.size());
}

/// Performance profile: rho(tau) over a fixed grid of thresholds.
struct ProfileCurve {
  std::vector<double> tau;
  std::vector<double> rho;
};

/// Quarter-decade grid from 1e-12 to 1e-1, ascending.
inline std::vector<double> default_tau_grid() {
  std::vector<double> grid;
  for (int q = -48; q <= -4; ++q) grid.push_back(std::pow(10.0, static_cast<double>(q) / 4.0));
  return grid;
}

inline ProfileCurve profile_curve(const std::vector<double>& gaps, const std::vector<double>& grid) {
  ProfileCurve curve;
  curve.tau = grid;
  curve.rho.reserve(grid.size());
  for (double tau : grid) curve.rho.push_back(profile_rho(gaps, tau));
  return curve;
}

/// Per-iteration (cumulative FLOPs, gap) history of an unbudgeted run.
struct GapTrajectory {
  std::vector<std::uint64_t> flops;
  std::vector<double> gaps;
};

inline SolverConfig benchmark_solver_config(RegionKind region, std::uint64_t budget,
                                            int max_iterations) {
  SolverConfig scfg;
  scfg.region_kind = region;
  scfg.flop_budget = budget;
  scfg.gap_tolerance = kBenchmarkGapFloor;
  scfg.max_iterations = max_iterations;
  scfg.record_trace = false;
  return scfg;
}

inline GapTrajectory gap_trajectory(const LassoProblem& p, RegionKind region, int max_iterations) {
  SolverConfig scfg = benchmark_solver_config(region, 0, max_iterations);
  scfg.record_trace = true;
  const SolverTrace trace = fista_solve(p, scfg);
  GapTrajectory tr;
  tr.flops.reserve(trace.entries.size());
  tr.gaps.reserve(trace.entries.size());
  for (const TraceEntry& e : trace.entries) {
    tr.flops.push_back(e.flops);
    tr.gaps.push_back(e.gap);
  }
  return tr;
}

/// Final gap of a budgeted run, read off the cached unbudgeted trajectory.
/// Exact, not an approximation: the budgeted run follows the identical iterate
/// sequence and stops at the first iteration whose cumulative FLOPs reach the
/// budget, or where the unbudgeted run itself stopped (gap floor / iteration
/// cap), whichever comes first.
inline double budgeted_gap(const GapTrajectory& tr, std::uint64_t budget) {
  detail::require(!tr.flops.empty(), "budgeted_gap: empty trajectory");
  const auto it = std::lower_bound(tr.flops.begin(), tr.flops.end(), budget);
  if (it == tr.flops.end()) return tr.gaps.back();
  return tr.gaps[static_cast<std::size_t>(it - tr.flops.begin())];
}

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Find a FLOP budget at which the Hölder-dome solver reaches gap <=
/// target_tau on a target_rho (+/- 0.02) fraction of the instance set:
/// double the budget until the success fraction reaches the target, then
/// bisect. Probes are evaluated on cached per-instance gap trajectories
/// (see budgeted_gap), so the search is exact and costs one unbudgeted solve
/// per instance. Throws CalibrationError with the last bracket if no budget
/// lands in the band within 60 bisection steps.
inline std::uint64_t calibrate_budget(const ExperimentConfig& cfg, double lambda_ratio) {
  cfg.validate();
  detail::require(cfg.target_rho > 0.0 && cfg.target_rho < 1.0,
                  "calibrate_budget: target_rho must lie in (0,1)");
  detail::require(std::isfinite(cfg.target_tau) && cfg.target_tau > 0.0,
                  "calibrate_budget: target_tau must be positive");

  std::vector<GapTrajectory> trajectories(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.threads, cfg.trials, [&](Index trial) {
    const InstanceData inst = make_instance(cfg, trial);
    const double lmax = (inst.A.transpose() * inst.y).lpNorm<Eigen::Infinity>();
    const LassoProblem p(inst.A, inst.y, lambda_ratio * lmax);
    trajectories[static_cast<std::size_t>(trial)] =
        gap_trajectory(p, RegionKind::holder_dome, cfg.max_iterations);
  });

  auto rho_at = [&](std::uint64_t budget) {
    int solved = 0;
    for (const GapTrajectory& tr : trajectories)
      if (budgeted_gap(tr, budget) <= cfg.target_tau) ++solved;
    return static_cast<double>(solved) / static_cast<double>(cfg.trials);
  };
  const double band_lo = cfg.target_rho - 0.02;
  const double band_hi = cfg.target_rho + 0.02;
  auto in_band = [&](double r) { return r >= band_lo && r <= band_hi; };
  auto bracket_error = [&](std::uint64_t lo, std::uint64_t hi, double rlo, double rhi) {
    return CalibrationError("calibrate_budget: target rho " + std::to_string(cfg.target_rho) +
                            " +/- 0.02 at tau " + std::to_string(cfg.target_tau) +
                            " is unattainable; last bracket [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "] with rho [" + std::to_string(rlo) + ", " +
                            std::to_string(rhi) + "]");
  };

  std::uint64_t lo = 1;
  double rho_lo = rho_at(lo);
  if (in_band(rho_lo)) return lo;
  if (rho_lo > band_hi) throw bracket_error(lo, lo, rho_lo, rho_lo);

  std::uint64_t hi = lo;
  double rho_hi = rho_lo;
  while (rho_hi < cfg.target_rho) {
    if (hi > (std::uint64_t{1} << 62)) throw bracket_error(lo, hi, rho_lo, rho_hi);
    lo = hi;
    rho_lo = rho_hi;
    hi *= 2;
    rho_hi = rho_at(hi);
  }
  if (in_band(rho_hi)) return hi;

  for (int step = 0; step < 60 && hi - lo > 1; ++step) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    const double r = rho_at(mid);
    if (in_band(r)) return mid;
    if (r < cfg.target_rho) {
      lo = mid;
      rho_lo = r;
    } else {
      hi = mid;
      rho_hi = r;
    }
  }
  throw bracket_error(lo, hi, rho_lo, rho_hi);
}

/// Convenience overload: calibrate for the first (or only) lambda ratio.
inline std::uint64_t calibrate_budget(const ExperimentConfig& cfg) {
  cfg.validate();
  return calibrate_budget(cfg, cfg.lambda_ratios.front());
}

/// Final gaps of all four solver variants on the shared instance set under a
/// common FLOP budget. The unscreened variant is run as a soundness reference
/// but excluded from profile curves.
struct BenchmarkSetupResult {
  std::uint64_t budget = 0;
  std::vector<double> gaps_sphere;
  std::vector<double> gaps_dome;
  std::vector<double> gaps_holder;
  std::vector<double> gaps_none;
};

inline BenchmarkSetupResult benchmark_experiment(const ExperimentConfig& cfg, double lambda_ratio,
                                                 std::uint64_t budget) {
  cfg.validate();
  detail::require(budget >= 1, "benchmark_experiment: budget must be positive");
  BenchmarkSetupResult out;
  out.budget = budget;
  const auto trials = static_cast<std::size_t>(cfg.trials);
  out.gaps_sphere.resize(trials);
  out.gaps_dome.resize(trials);
  out.gaps_holder.resize(trials);
  out.gaps_none.resize(trials);

  parallel_for(cfg.threads, cfg.trials, [&](Index trial) {
    const InstanceData inst = make_instance(cfg, trial);
    const double lmax = (inst.A.transpose() * inst.y).lpNorm<Eigen::Infinity>();
    const LassoProblem p(inst.A, inst.y, lambda_ratio * lmax);
    auto run = [&](RegionKind region) {
      return fista_solve(p, benchmark_solver_config(region, budget, cfg.max_iterations)).final_gap;
    };
    const auto slot = static_cast<std::size_t>(trial);
    out.gaps_sphere[slot] = run(RegionKind::gap_sphere);
    out.gaps_dome[slot] = run(RegionKind::gap_dome);
    out.gaps_holder[slot] = run(RegionKind::holder_dome);
    out.gaps_none[slot] = run(RegionKind::none);
  });
  return out;
}

}  // namespace lassoscreen
