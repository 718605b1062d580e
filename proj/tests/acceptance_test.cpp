// Acceptance harness: exercises the end-to-end guarantees of the toolkit at
// full experiment scale and prints one PASS/FAIL line per criterion.
//
//   1. screening soundness against high-accuracy reference solutions
//   2. support-function dominance chain + sampled membership inclusion
//   3. strict-inclusion witness separates the two domes
//   4. dome support values against independent geometric oracles
//   5. dome radius against a pairwise-sampling oracle
//   6. radius-ratio experiment bands
//   7. budget-calibrated benchmark ordering
//   8. over-regularized boundary behavior
//   9. byte-identical reruns across thread counts (via the CLI)
//
// Exit code 0 iff every selected criterion passes. `--trials` shrinks the
// instance counts of the heavy criteria (1, 6, 7) for quick runs; the
// defaults match the full scale.

#include <CLI11.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lassoscreen/experiments.hpp"
#include "lassoscreen/io.hpp"
#include "lassoscreen/lassoscreen.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace lassoscreen;
using namespace lassoscreen::testing;

namespace {

namespace fs = std::filesystem;

struct Options {
  int trials = 0;  // 0 = full scale per criterion
  int threads = 1;
  std::vector<int> only;
};

/// Collects expectation failures for one criterion; prints the first few.
class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    ++checks_;
    if (cond) return;
    ++failures_;
    if (failures_ <= 10) std::cout << "    fail: " << what << '\n';
    if (failures_ == 11) std::cout << "    fail: (further failures suppressed)\n";
  }
  bool passed() const { return checks_ > 0 && failures_ == 0; }
  long checks() const { return checks_; }
  long failures() const { return failures_; }

 private:
  long checks_ = 0;
  long failures_ = 0;
};

std::string fmt(double v) { return format_double(v); }

Dome random_dome(Index m, Rng& rng, double min_cos = -1.0, double max_cos = 1.2) {
  Vector c(m), g(m);
  for (Index i = 0; i < m; ++i) c[i] = rng.uniform(-2.0, 2.0);
  for (Index i = 0; i < m; ++i) g[i] = rng.normal();
  g /= g.norm();
  const double r = rng.uniform(0.1, 2.0);
  const double cosine = rng.uniform(min_cos, max_cos);
  const double offset = g.dot(c) + r * cosine;
  return Dome{Sphere{std::move(c), r}, HalfSpace{std::move(g), offset}};
}

Vector random_unit(Index m, Rng& rng) {
  Vector a(m);
  double norm = 0.0;
  do {
    for (Index i = 0; i < m; ++i) a[i] = rng.normal();
    norm = a.norm();
  } while (norm == 0.0);
  return a / norm;
}

constexpr double kRatios[3] = {0.3, 0.5, 0.8};
constexpr DictionaryKind kDicts[2] = {DictionaryKind::gaussian, DictionaryKind::toeplitz};

// -----------------------------------------------------------------------
// 1. Safety soundness: atoms screened at tight tolerance are zero in a
//    high-accuracy reference solution.
// -----------------------------------------------------------------------
bool criterion1(const Options& o) {
  Checker chk;
  const int instances = o.trials > 0 ? o.trials : 50;
  for (int t = 0; t < instances; ++t) {
    ExperimentConfig gen;
    gen.m = 100;
    gen.n = 500;
    gen.dictionary_kind = kDicts[t % 2];
    gen.seed = 1001;
    const InstanceData inst = make_instance(gen, t);
    const double ratio = kRatios[t % 3];
    const double lmax = (inst.A.transpose() * inst.y).lpNorm<Eigen::Infinity>();
    const LassoProblem p(inst.A, inst.y, ratio * lmax);
    const std::string label = "instance " + std::to_string(t) + " (" +
                              to_string(gen.dictionary_kind) + ", ratio " + fmt(ratio) + ")";

    SolverConfig ref_cfg;
    ref_cfg.region_kind = RegionKind::none;
    ref_cfg.gap_tolerance = 1e-12;
    ref_cfg.max_iterations = 300000;
    ref_cfg.record_trace = false;
    const SolverTrace ref = fista_solve(p, ref_cfg);
    chk.expect(ref.termination_reason == TerminationReason::gap_tolerance,
               label + ": reference did not reach gap 1e-12");
    if (ref.termination_reason != TerminationReason::gap_tolerance) continue;

    for (RegionKind kind :
         {RegionKind::gap_sphere, RegionKind::gap_dome, RegionKind::holder_dome}) {
      SolverConfig cfg = ref_cfg;
      cfg.region_kind = kind;
      const SolverTrace run = fista_solve(p, cfg);
      std::vector<char> alive(static_cast<std::size_t>(p.n()), 0);
      for (Index j : run.final_alive) alive[static_cast<std::size_t>(j)] = 1;
      for (Index j = 0; j < p.n(); ++j) {
        if (!alive[static_cast<std::size_t>(j)] && std::abs(ref.x[j]) > 1e-8) {
          chk.expect(false, label + ", " + to_string(kind) + ": screened atom " +
                                std::to_string(j) + " has reference coefficient " + fmt(ref.x[j]));
        }
      }
      chk.expect(true, "");  // per-run tally so `checks()` reflects the work done
    }
  }
  std::cout << "    " << instances << " instances, " << chk.checks() << " checks\n";
  return chk.passed();
}

// -----------------------------------------------------------------------
// 2. Inclusion chain: directional support dominance and sampled membership.
// -----------------------------------------------------------------------
bool criterion2(const Options&) {
  Checker chk;
  struct Snapshot {
    Vector u, Ax;
    double gap = 0.0, lam_l1 = 0.0;
  };
  Rng rng(2002);
  long sampled_points = 0;
  for (int t = 0; t < 20; ++t) {
    ExperimentConfig gen;
    gen.m = 100;
    gen.n = 500;
    gen.dictionary_kind = kDicts[t % 2];
    gen.seed = 2101;
    const InstanceData inst = make_instance(gen, t);
    const double lmax = (inst.A.transpose() * inst.y).lpNorm<Eigen::Infinity>();
    const LassoProblem p(inst.A, inst.y, kRatios[t % 3] * lmax);

    std::vector<Snapshot> snaps;
    auto observer = [&](const IterationState& st) {
      snaps.push_back(Snapshot{st.u, st.y - st.residual, st.gap, st.lambda * st.l1_norm});
    };
    SolverConfig cfg;
    cfg.region_kind = RegionKind::none;
    cfg.gap_tolerance = 0.0;
    cfg.max_iterations = 19;
    cfg.record_trace = false;
    fista_solve(p, cfg, observer);
    chk.expect(snaps.size() == 20,
               "instance " + std::to_string(t) + ": expected 20 iterate pairs");

    for (std::size_t s = 0; s < snaps.size(); ++s) {
      const Snapshot& sn = snaps[s];
      const Sphere sphere = gap_sphere_at(sn.u, sn.gap);
      const Dome dome = gap_dome_at(p.y, sn.u, sn.gap);
      const Dome holder = holder_dome_at(p.y, sn.u, sn.Ax, sn.lam_l1);
      for (int d = 0; d < 100; ++d) {
        const Vector a = random_unit(p.m(), rng);
        const double s_h = dome_sup_inner(holder, a);
        const double s_d = dome_sup_inner(dome, a);
        const double s_s = sphere_sup_inner(sphere, a);
        if (!(s_h <= s_d + 1e-10 && s_d <= s_s + 1e-10)) {
          chk.expect(false, "instance " + std::to_string(t) + " pair " + std::to_string(s) +
                                ": sup chain violated (" + fmt(s_h) + ", " + fmt(s_d) + ", " +
                                fmt(s_s) + ")");
        }
      }
      chk.expect(true, "");

      // membership of sampled holder-dome points in both outer regions
      if (sampled_points < 1000) {
        const SafeRegion dome_region{dome};
        const SafeRegion sphere_region{sphere};
        for (int k = 0; k < 3 && sampled_points < 1000; ++k, ++sampled_points) {
          const Vector pt = sample_dome_point(holder, rng);
          chk.expect(region_contains(dome_region, pt, 1e-10),
                     "sampled holder point escapes the gap dome (instance " + std::to_string(t) +
                         ", pair " + std::to_string(s) + ")");
          chk.expect(region_contains(sphere_region, pt, 1e-10),
                     "sampled holder point escapes the gap sphere (instance " + std::to_string(t) +
                         ", pair " + std::to_string(s) + ")");
        }
      }
    }
  }
  chk.expect(sampled_points >= 1000, "fewer than 1000 sampled membership points");
  std::cout << "    20 instances x 20 pairs x 100 directions, " << sampled_points
            << " sampled memberships\n";
  return chk.passed();
}

// -----------------------------------------------------------------------
// 3. Strict inclusion witness: inside the gap dome, outside the holder cut.
// -----------------------------------------------------------------------
bool criterion3(const Options&) {
  Checker chk;
  for (int k = 0; k < 100; ++k) {
    const LassoProblem p =
        random_problem(30, 90, kRatios[k % 3], 3001 + static_cast<std::uint64_t>(k));
    const Vector x = ista_steps(p, 1 + k % 10);
    const Vector u = dual_scaling(p, x);
    const std::string label = "pair " + std::to_string(k);
    chk.expect(primal_objective(p, x) < primal_objective(p, Vector::Zero(p.n())),
               label + ": iterate does not improve on zero");
    const double gap = duality_gap(p, x, u);
    chk.expect(gap > 0.0, label + ": pair is already optimal");
    const Vector u0 = strict_inclusion_witness(p, x, u);
    chk.expect(region_contains(SafeRegion{gap_dome(p, x, u)}, u0, 1e-10),
               label + ": witness escapes the gap dome");
    const HalfSpace cut = cutting_halfspace(p, x);
    const double margin = cut.normal.dot(u0) - cut.offset;
    chk.expect(margin > 0.0, label + ": witness does not violate the cut (margin " +
                                 fmt(margin) + ")");
  }

  const WorkedInstance w;
  const Vector u0 = strict_inclusion_witness(w.p, w.x, w.u);
  chk.expect(std::abs(u0[0] - 0.52) <= 1e-12 && std::abs(u0[1]) <= 1e-12,
             "worked 2-d witness is (" + fmt(u0[0]) + ", " + fmt(u0[1]) + "), expected (0.52, 0)");
  std::cout << "    100 non-optimal pairs + the worked 2-d instance\n";
  return chk.passed();
}

// -----------------------------------------------------------------------
// 4. Dome support formula against geometric oracles.
// -----------------------------------------------------------------------
bool criterion4(const Options&) {
  Checker chk;
  Rng rng(4004);
  for (int k = 0; k < 1000; ++k) {
    const Dome d = random_dome(2, rng);
    const Vector a = random_unit(2, rng);
    const double closed = dome_sup_inner(d, a);
    const double oracle = dome_sup_oracle_2d(d, a);
    if (std::abs(closed - oracle) > 1e-9) {
      chk.expect(false, "m=2 case " + std::to_string(k) + ": closed " + fmt(closed) +
                            " vs oracle " + fmt(oracle));
    }
  }
  chk.expect(true, "");
  for (int k = 0; k < 30; ++k) {
    const Dome d = random_dome(3, rng);
    const Vector a = random_unit(3, rng);
    const double closed = dome_sup_inner(d, a);
    const double sampled = dome_sup_oracle_sampling(d, a, 300000, rng);
    chk.expect(sampled <= closed + 1e-9,
               "m=3 case " + std::to_string(k) + ": sampled point exceeds the closed form");
    chk.expect(closed - sampled <= 1e-3, "m=3 case " + std::to_string(k) + ": closed " +
                                             fmt(closed) + " vs sampled " + fmt(sampled));
  }
  std::cout << "    1000 planar boundary cases + 30 sampled 3-d cases\n";
  return chk.passed();
}

// -----------------------------------------------------------------------
// 5. Dome radius against the pairwise-sampling oracle.
// -----------------------------------------------------------------------
bool criterion5(const Options&) {
  Checker chk;
  Rng rng(5005);
  const Index dims[3] = {2, 3, 5};
  for (int k = 0; k < 100; ++k) {
    const Index m = dims[k % 3];
    const Dome d = random_dome(m, rng);
    const double radius = region_radius(SafeRegion{d});
    const double oracle = dome_radius_oracle_pairwise(d, 1500, rng);
    chk.expect(oracle <= radius + 1e-9,
               "case " + std::to_string(k) + ": sampled half-diameter exceeds the closed form");
    chk.expect(radius - oracle <= 1e-2, "case " + std::to_string(k) + " (m=" + std::to_string(m) +
                                            "): radius " + fmt(radius) + " vs oracle " +
                                            fmt(oracle));
  }
  std::cout << "    100 domes in dimensions {2, 3, 5}\n";
  return chk.passed();
}

// -----------------------------------------------------------------------
// 6. Radius-ratio experiment bands.
// -----------------------------------------------------------------------
bool criterion6(const Options& o) {
  Checker chk;
  double min_mean = std::numeric_limits<double>::infinity();
  for (DictionaryKind dict : kDicts) {
    ExperimentConfig cfg;
    cfg.dictionary_kind = dict;
    cfg.trials = o.trials > 0 ? o.trials : 50;
    cfg.seed = 6006;
    cfg.threads = o.threads;
    const auto table = radius_ratio_experiment(cfg);
    const std::size_t n_cp = cfg.gap_checkpoints.size();
    for (std::size_t i = 0; i < table.size(); ++i) {
      const RadiusRatioCell& cell = table[i];
      const std::string label = to_string(dict) + " ratio " + fmt(cell.lambda_ratio) +
                                " checkpoint " + fmt(cell.gap_checkpoint);
      if (cell.trials_counted > 0) {
        chk.expect(cell.mean_ratio <= 1.0 + 1e-12,
                   label + ": mean ratio " + fmt(cell.mean_ratio) + " above 1");
        min_mean = std::min(min_mean, cell.mean_ratio);
      }
      if (i % n_cp == n_cp - 1) {  // smallest checkpoint of this lambda ratio
        chk.expect(cell.trials_counted > 0, label + ": no trial reached the checkpoint");
        if (cell.trials_counted > 0) {
          chk.expect(cell.mean_ratio >= 0.55 && cell.mean_ratio <= 0.85,
                     label + ": small-gap mean ratio " + fmt(cell.mean_ratio) +
                         " outside [0.55, 0.85]");
        }
      }
    }
  }
  chk.expect(min_mean <= 0.85, "minimum mean ratio " + fmt(min_mean) + " above 0.85");
  std::cout << "    minimum mean ratio " << fmt(min_mean) << '\n';
  return chk.passed();
}

// -----------------------------------------------------------------------
// 7. Budget-calibrated benchmark: in-band success rate and dome ordering.
// -----------------------------------------------------------------------
bool criterion7(const Options& o) {
  Checker chk;
  int dominated = 0;
  constexpr int kSetups = 6;
  for (int s = 0; s < kSetups; ++s) {
    const DictionaryKind dict = kDicts[s / 3];
    const double ratio = kRatios[s % 3];
    ExperimentConfig cfg;
    cfg.dictionary_kind = dict;
    cfg.lambda_ratios = {ratio};
    cfg.trials = o.trials > 0 ? o.trials : 200;
    cfg.seed = 7007;
    cfg.threads = o.threads;
    const std::string label = to_string(dict) + " ratio " + fmt(ratio);
    try {
      const std::uint64_t budget = calibrate_budget(cfg, ratio);
      const BenchmarkSetupResult res = benchmark_experiment(cfg, ratio, budget);
      const double rho_h = profile_rho(res.gaps_holder, cfg.target_tau);
      const double rho_d = profile_rho(res.gaps_dome, cfg.target_tau);
      chk.expect(rho_h >= 0.48 && rho_h <= 0.52,
                 label + ": calibrated holder rho " + fmt(rho_h) + " outside [0.48, 0.52]");
      if (rho_h >= rho_d) ++dominated;
      std::cout << "    " << label << ": budget " << budget << ", rho_holder " << fmt(rho_h)
                << ", rho_dome " << fmt(rho_d) << '\n';
    } catch (const CalibrationError& e) {
      chk.expect(false, label + ": " + e.what());
    }
  }
  chk.expect(dominated >= 5, "holder dominates the gap dome in only " +
                                 std::to_string(dominated) + "/6 setups");
  std::cout << "    holder >= gap dome at target tau in " << dominated << "/6 setups\n";
  return chk.passed();
}

// -----------------------------------------------------------------------
// 8. Over-regularized boundary: immediate zero solution, everything screened.
// -----------------------------------------------------------------------
bool criterion8(const Options&) {
  Checker chk;
  for (int t = 0; t < 20; ++t) {
    ExperimentConfig gen;
    gen.m = 100;
    gen.n = 500;
    gen.dictionary_kind = kDicts[t % 2];
    gen.seed = 8008;
    const InstanceData inst = make_instance(gen, t);
    const double lmax = (inst.A.transpose() * inst.y).lpNorm<Eigen::Infinity>();
    const LassoProblem p(inst.A, inst.y, 1.01 * lmax);
    for (RegionKind kind :
         {RegionKind::gap_sphere, RegionKind::gap_dome, RegionKind::holder_dome}) {
      SolverConfig cfg;
      cfg.region_kind = kind;
      cfg.gap_tolerance = 0.0;
      const SolverTrace out = fista_solve(p, cfg);
      const std::string label =
          "instance " + std::to_string(t) + ", " + to_string(kind);
      chk.expect(out.iterations == 0, label + ": did not stop at iteration 0");
      chk.expect(out.x.lpNorm<Eigen::Infinity>() == 0.0, label + ": solution is not zero");
      chk.expect(out.final_gap == 0.0, label + ": gap is not exactly zero");
      chk.expect(out.final_alive.empty(), label + ": some atom survived");
      chk.expect(!out.screened_per_iteration.empty() &&
                     out.screened_per_iteration.front() == p.n(),
                 label + ": not everything screened at iteration 0");
    }
  }
  std::cout << "    20 instances x 3 regions at lambda = 1.01 lambda_max\n";
  return chk.passed();
}

// -----------------------------------------------------------------------
// 9. Determinism through the CLI: byte-identical reruns at any thread count.
// -----------------------------------------------------------------------
fs::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("lassoscreen_acceptance_" + std::to_string(::getpid()) + "_" + tag + "_" +
                        std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<unreadable: " + p.string() + ">";
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const fs::path log_dir = fresh_dir("logs");
  const std::string cmd = std::string("\"") + LASSOSCREEN_CLI_PATH + "\" " + args + " > \"" +
                          (log_dir / "out.txt").string() + "\" 2> \"" +
                          (log_dir / "err.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool criterion9(const Options&) {
  Checker chk;

  const fs::path s1 = fresh_dir("solve1");
  const fs::path s2 = fresh_dir("solve2");
  const std::string solve_args = "--seed 21 solve --m 30 --n 80 --lambda-ratio 0.5 --gap-tol 1e-9";
  chk.expect(run_cli("--out-dir \"" + s1.string() + "\" " + solve_args) == 0, "solve run 1 failed");
  chk.expect(run_cli("--out-dir \"" + s2.string() + "\" " + solve_args) == 0, "solve run 2 failed");
  chk.expect(read_file(s1 / "trace.csv") == read_file(s2 / "trace.csv"),
             "solve trace.csv differs between reruns");
  chk.expect(read_file(s1 / "result.json") == read_file(s2 / "result.json"),
             "solve result.json differs between reruns");

  const std::string rr_args =
      "--seed 22 radius-ratio --m 20 --n 50 --trials 6 --ratios 0.4,0.7 "
      "--checkpoints 1e-1,1e-3,1e-5 --dict both";
  const fs::path r1 = fresh_dir("rr1");
  const fs::path r3 = fresh_dir("rr3");
  const fs::path r3b = fresh_dir("rr3b");
  chk.expect(run_cli("--threads 1 --out-dir \"" + r1.string() + "\" " + rr_args) == 0,
             "radius-ratio with 1 thread failed");
  chk.expect(run_cli("--threads 3 --out-dir \"" + r3.string() + "\" " + rr_args) == 0,
             "radius-ratio with 3 threads failed");
  chk.expect(run_cli("--threads 3 --out-dir \"" + r3b.string() + "\" " + rr_args) == 0,
             "radius-ratio rerun failed");
  const std::string rr_bytes = read_file(r1 / "radius_ratio.csv");
  chk.expect(rr_bytes == read_file(r3 / "radius_ratio.csv"),
             "radius_ratio.csv differs across thread counts");
  chk.expect(rr_bytes == read_file(r3b / "radius_ratio.csv"),
             "radius_ratio.csv differs between reruns");

  const std::string bench_args =
      "--seed 23 benchmark --m 15 --n 40 --trials 5 --ratios 0.5 --dict gaussian "
      "--flop-budget 400000";
  const fs::path b1 = fresh_dir("bench1");
  const fs::path b2 = fresh_dir("bench2");
  chk.expect(run_cli("--threads 1 --out-dir \"" + b1.string() + "\" " + bench_args) == 0,
             "benchmark with 1 thread failed");
  chk.expect(run_cli("--threads 2 --out-dir \"" + b2.string() + "\" " + bench_args) == 0,
             "benchmark with 2 threads failed");
  chk.expect(read_file(b1 / "profiles.csv") == read_file(b2 / "profiles.csv"),
             "profiles.csv differs across thread counts");
  chk.expect(read_file(b1 / "budget.json") == read_file(b2 / "budget.json"),
             "budget.json differs across thread counts");

  std::cout << "    solve rerun + radius-ratio and benchmark across thread counts\n";
  return chk.passed();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Acceptance criteria for the safe-screening toolkit"};
  app.add_option("--trials", o.trials,
                 "Override the instance count of the heavy criteria (0 = full scale)")
      ->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads for the experiment criteria")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--only", o.only, "Run only these criteria (comma-separated ids)")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  using CriterionFn = std::function<bool(const Options&)>;
  const std::vector<std::pair<std::string, CriterionFn>> criteria = {
      {"screening soundness vs reference solutions", criterion1},
      {"support dominance chain and sampled inclusion", criterion2},
      {"strict inclusion witness", criterion3},
      {"dome support formula vs oracles", criterion4},
      {"dome radius vs sampling oracle", criterion5},
      {"radius-ratio experiment bands", criterion6},
      {"budget-calibrated benchmark ordering", criterion7},
      {"over-regularized boundary", criterion8},
      {"byte-identical reruns across thread counts", criterion9},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!o.only.empty() && std::find(o.only.begin(), o.only.end(), id) == o.only.end()) continue;
    std::cout << "criterion " << id << " (" << criteria[i].first << "):\n" << std::flush;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criteria[i].second(o);
    } catch (const std::exception& e) {
      std::cout << "    unexpected exception: " << e.what() << '\n';
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  ["
              << static_cast<long>(seconds) << "s]\n"
              << std::flush;
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all selected criteria passed\n";
  return 0;
}
