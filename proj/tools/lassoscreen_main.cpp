// Command-line front end: solve single Lasso instances and run the two
// screening experiments, writing plot-ready CSV/JSON plus a run manifest.
//
// Exit codes: 0 success, 1 runtime/numerical failure, 2 usage error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lassoscreen/experiments.hpp"
#include "lassoscreen/io.hpp"
#include "lassoscreen/solver.hpp"
#include "lassoscreen/version.hpp"

namespace fs = std::filesystem;
using lassoscreen::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string json_scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return lassoscreen::format_double(v.get<double>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_null()) return "";
  throw std::runtime_error("config: unsupported JSON value " + v.dump());
}

// Accepts either flat key=value text (with optional [subcommand] sections) or
// a JSON object; a run manifest is also accepted directly, in which case its
// embedded "config" object is used. Command-line flags always win over config
// values.
class MixedConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream buffer;
    buffer << input.rdbuf();
    const std::string text = buffer.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream ini(text);
      return CLI::ConfigBase::from_config(ini);
    }
    json root = json::parse(text);
    if (root.contains("tool") && root.contains("config") && root["config"].is_object())
      root = root["config"];  // run manifest: reuse its resolved configuration
    std::vector<CLI::ConfigItem> items;
    walk(root, {}, items);
    return items;
  }

 private:
  static void walk(const json& obj, const std::vector<std::string>& parents,
                   std::vector<CLI::ConfigItem>& items) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const json& v = it.value();
      if (v.is_object()) {
        auto nested = parents;
        nested.push_back(it.key());
        // Section-open marker: this is how a configurable subcommand section
        // in a config file activates the subcommand itself.
        CLI::ConfigItem open;
        open.parents = nested;
        open.name = "++";
        items.push_back(std::move(open));
        walk(v, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (v.is_array())
        for (const json& e : v) item.inputs.push_back(json_scalar_to_string(e));
      else
        item.inputs.push_back(json_scalar_to_string(v));
      items.push_back(std::move(item));
    }
  }
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int threads = 1;
};

struct SolveOptions {
  lassoscreen::Index m = 100;
  lassoscreen::Index n = 500;
  std::string dict = "gaussian";
  double sigma = 0.0;
  double lambda_ratio = 0.5;
  double lambda = 0.0;  // 0 = derive from lambda_ratio
  std::string region = "holder_dome";
  double gap_tol = 1e-9;
  std::uint64_t flop_budget = 0;
  int max_iter = 100000;
  int screen_every = 1;
  std::string matrix_file;
  std::string observation_file;
};

struct ExperimentOptions {
  lassoscreen::Index m = 100;
  lassoscreen::Index n = 500;
  std::string dict = "both";
  double sigma = 0.0;
  std::vector<double> ratios = {0.3, 0.5, 0.8};
  int trials = 50;
  std::vector<double> checkpoints = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  int max_iter = 100000;
  // benchmark only:
  double target_rho = 0.5;
  double target_tau = 1e-7;
  std::uint64_t flop_budget = 0;  // 0 = calibrate per setup
};

std::vector<lassoscreen::DictionaryKind> parse_dict_selection(const std::string& dict) {
  if (dict == "both")
    return {lassoscreen::DictionaryKind::gaussian, lassoscreen::DictionaryKind::toeplitz};
  return {lassoscreen::dictionary_kind_from_string(dict)};
}

lassoscreen::ExperimentConfig experiment_config(const GlobalOptions& g, const ExperimentOptions& e,
                                                lassoscreen::DictionaryKind dict) {
  lassoscreen::ExperimentConfig cfg;
  cfg.m = e.m;
  cfg.n = e.n;
  cfg.dictionary_kind = dict;
  cfg.lambda_ratios = e.ratios;
  cfg.trials = e.trials;
  cfg.seed = g.seed;
  cfg.gap_checkpoints = e.checkpoints;
  cfg.target_rho = e.target_rho;
  cfg.target_tau = e.target_tau;
  cfg.toeplitz_sigma = e.sigma;
  cfg.max_iterations = e.max_iter;
  cfg.threads = g.threads;
  cfg.validate();
  return cfg;
}

json global_config_json(const GlobalOptions& g) {
  return json{{"seed", g.seed}, {"out-dir", g.out_dir}, {"threads", g.threads}};
}

int run_solve(const GlobalOptions& g, const SolveOptions& o) {
  std::unique_ptr<lassoscreen::LassoProblem> problem;
  if (!o.matrix_file.empty() || !o.observation_file.empty()) {
    if (o.matrix_file.empty() || o.observation_file.empty())
      throw UsageError("solve: --matrix and --observation must be given together");
    if (o.lambda <= 0.0 && o.lambda_ratio <= 0.0)
      throw UsageError("solve: imported problems need --lambda or a positive --lambda-ratio");
    lassoscreen::Matrix A = lassoscreen::read_matrix_text(o.matrix_file);
    lassoscreen::Vector y = lassoscreen::read_vector_text(o.observation_file);
    const double lambda =
        o.lambda > 0.0
            ? o.lambda
            : o.lambda_ratio * (A.transpose() * y).lpNorm<Eigen::Infinity>();
    problem = std::make_unique<lassoscreen::LassoProblem>(std::move(A), std::move(y), lambda);
  } else {
    if (o.lambda <= 0.0 && o.lambda_ratio <= 0.0)
      throw UsageError("solve: --lambda or --lambda-ratio must be positive");
    lassoscreen::ExperimentConfig gen;
    gen.m = o.m;
    gen.n = o.n;
    gen.dictionary_kind = o.dict == "toeplitz" ? lassoscreen::DictionaryKind::toeplitz
                                               : lassoscreen::DictionaryKind::gaussian;
    gen.toeplitz_sigma = o.sigma;
    gen.seed = g.seed;
    const lassoscreen::InstanceData inst = lassoscreen::make_instance(gen, 0);
    const double lambda =
        o.lambda > 0.0
            ? o.lambda
            : o.lambda_ratio * (inst.A.transpose() * inst.y).lpNorm<Eigen::Infinity>();
    problem = std::make_unique<lassoscreen::LassoProblem>(inst.A, inst.y, lambda);
  }

  lassoscreen::SolverConfig scfg;
  scfg.region_kind = lassoscreen::region_kind_from_string(o.region);
  scfg.flop_budget = o.flop_budget;
  scfg.gap_tolerance = o.gap_tol;
  scfg.max_iterations = o.max_iter;
  scfg.screen_every = o.screen_every;
  const lassoscreen::SolverTrace trace = lassoscreen::fista_solve(*problem, scfg);

  const fs::path out_dir(g.out_dir);
  fs::create_directories(out_dir);
  lassoscreen::write_trace_csv(out_dir / "trace.csv", trace);
  lassoscreen::write_json_file(out_dir / "result.json", lassoscreen::solve_result_json(trace));

  json config = global_config_json(g);
  config["solve"] = json{{"m", o.m},
                         {"n", o.n},
                         {"dict", o.dict},
                         {"sigma", o.sigma},
                         {"lambda-ratio", o.lambda_ratio},
                         {"lambda", o.lambda},
                         {"region", o.region},
                         {"gap-tol", o.gap_tol},
                         {"flop-budget", o.flop_budget},
                         {"max-iter", o.max_iter},
                         {"screen-every", o.screen_every},
                         {"matrix", o.matrix_file},
                         {"observation", o.observation_file}};
  lassoscreen::write_run_manifest(out_dir, "solve", config, g.seed, {"trace.csv", "result.json"});
  return 0;
}

int run_radius_ratio(const GlobalOptions& g, const ExperimentOptions& e) {
  std::vector<std::pair<lassoscreen::DictionaryKind, lassoscreen::RadiusRatioCell>> rows;
  for (const auto dict : parse_dict_selection(e.dict)) {
    const auto cfg = experiment_config(g, e, dict);
    for (const auto& cell : lassoscreen::radius_ratio_experiment(cfg)) rows.emplace_back(dict, cell);
  }
  const fs::path out_dir(g.out_dir);
  fs::create_directories(out_dir);
  lassoscreen::write_radius_ratio_csv(out_dir / "radius_ratio.csv", rows);

  json config = global_config_json(g);
  config["radius-ratio"] = json{{"m", e.m},
                                {"n", e.n},
                                {"dict", e.dict},
                                {"sigma", e.sigma},
                                {"ratios", e.ratios},
                                {"trials", e.trials},
                                {"checkpoints", e.checkpoints},
                                {"max-iter", e.max_iter}};
  lassoscreen::write_run_manifest(out_dir, "radius-ratio", config, g.seed, {"radius_ratio.csv"});
  return 0;
}

int run_benchmark(const GlobalOptions& g, const ExperimentOptions& e) {
  const std::vector<double> tau_grid = lassoscreen::default_tau_grid();
  std::vector<lassoscreen::ProfileRow> rows;
  json setups = json::array();
  for (const auto dict : parse_dict_selection(e.dict)) {
    const auto cfg = experiment_config(g, e, dict);
    for (const double ratio : e.ratios) {
      const std::uint64_t budget =
          e.flop_budget > 0 ? e.flop_budget : lassoscreen::calibrate_budget(cfg, ratio);
      const auto result = lassoscreen::benchmark_experiment(cfg, ratio, budget);
      const auto add_rows = [&](lassoscreen::RegionKind region, const std::vector<double>& gaps) {
        const auto curve = lassoscreen::profile_curve(gaps, tau_grid);
        for (std::size_t i = 0; i < curve.tau.size(); ++i)
          rows.push_back({dict, ratio, region, curve.tau[i], curve.rho[i]});
      };
      add_rows(lassoscreen::RegionKind::gap_sphere, result.gaps_sphere);
      add_rows(lassoscreen::RegionKind::gap_dome, result.gaps_dome);
      add_rows(lassoscreen::RegionKind::holder_dome, result.gaps_holder);
      setups.push_back(json{{"dict", lassoscreen::to_string(dict)},
                            {"lambda_ratio", ratio},
                            {"budget", budget},
                            {"rho_at_target_tau",
                             lassoscreen::profile_rho(result.gaps_holder, e.target_tau)}});
    }
  }
  const fs::path out_dir(g.out_dir);
  fs::create_directories(out_dir);
  lassoscreen::write_profiles_csv(out_dir / "profiles.csv", rows);
  lassoscreen::write_json_file(out_dir / "budget.json",
                               json{{"target_rho", e.target_rho},
                                    {"target_tau", e.target_tau},
                                    {"setups", setups}});

  json config = global_config_json(g);
  config["benchmark"] = json{{"m", e.m},
                             {"n", e.n},
                             {"dict", e.dict},
                             {"sigma", e.sigma},
                             {"ratios", e.ratios},
                             {"trials", e.trials},
                             {"target-rho", e.target_rho},
                             {"target-tau", e.target_tau},
                             {"flop-budget", e.flop_budget},
                             {"max-iter", e.max_iter}};
  lassoscreen::write_run_manifest(out_dir, "benchmark", config, g.seed,
                                  {"profiles.csv", "budget.json"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lasso solver toolkit with safe-region screening"};
  app.set_version_flag("--version", std::string(lassoscreen::kToolVersion));
  app.config_formatter(std::make_shared<MixedConfig>());
  app.set_config("--config", "", "JSON or key=value config file (a run_manifest.json also works)");
  app.require_subcommand(0, 1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed for all randomness")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for trial-level parallelism")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SolveOptions so;
  CLI::App* solve = app.add_subcommand("solve", "Solve one Lasso instance with screening");
  solve->configurable(true);
  solve->add_option("--m", so.m, "Observation dimension")->capture_default_str();
  solve->add_option("--n", so.n, "Number of atoms")->capture_default_str();
  solve->add_option("--dict", so.dict, "Dictionary kind")
      ->check(CLI::IsMember({"gaussian", "toeplitz"}))
      ->capture_default_str();
  solve->add_option("--sigma", so.sigma, "Toeplitz bump width (0 = m/50)")->capture_default_str();
  solve->add_option("--lambda-ratio", so.lambda_ratio, "lambda as a fraction of lambda_max")
      ->capture_default_str();
  solve->add_option("--lambda", so.lambda, "Absolute lambda (overrides --lambda-ratio)")
      ->capture_default_str();
  solve->add_option("--region", so.region, "Safe region used for screening")
      ->check(CLI::IsMember({"none", "gap_sphere", "gap_dome", "holder_dome"}))
      ->capture_default_str();
  solve->add_option("--gap-tol", so.gap_tol, "Stop when the duality gap falls below this")
      ->capture_default_str();
  solve->add_option("--flop-budget", so.flop_budget, "Stop after this many FLOPs (0 = unlimited)")
      ->capture_default_str();
  solve->add_option("--max-iter", so.max_iter, "Iteration cap")->capture_default_str();
  solve->add_option("--screen-every", so.screen_every, "Screen every k-th iteration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_option("--matrix", so.matrix_file, "Load the dictionary from a text file");
  solve->add_option("--observation", so.observation_file, "Load the observation from a text file");

  ExperimentOptions ro;
  CLI::App* radius = app.add_subcommand("radius-ratio", "Dome radius-ratio curves experiment");
  radius->configurable(true);
  radius->add_option("--m", ro.m, "Observation dimension")->capture_default_str();
  radius->add_option("--n", ro.n, "Number of atoms")->capture_default_str();
  radius->add_option("--dict", ro.dict, "Dictionary kind or 'both'")
      ->check(CLI::IsMember({"gaussian", "toeplitz", "both"}))
      ->capture_default_str();
  radius->add_option("--sigma", ro.sigma, "Toeplitz bump width (0 = m/50)")->capture_default_str();
  radius->add_option("--ratios", ro.ratios, "lambda/lambda_max values")
      ->delimiter(',')
      ->capture_default_str();
  radius->add_option("--trials", ro.trials, "Instances per setup")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  radius->add_option("--checkpoints", ro.checkpoints, "Decreasing gap checkpoints")
      ->delimiter(',')
      ->capture_default_str();
  radius->add_option("--max-iter", ro.max_iter, "Iteration cap per solve")->capture_default_str();

  ExperimentOptions bo;
  bo.trials = 200;
  CLI::App* bench = app.add_subcommand("benchmark", "FLOP-budgeted performance profiles");
  bench->configurable(true);
  bench->add_option("--m", bo.m, "Observation dimension")->capture_default_str();
  bench->add_option("--n", bo.n, "Number of atoms")->capture_default_str();
  bench->add_option("--dict", bo.dict, "Dictionary kind or 'both'")
      ->check(CLI::IsMember({"gaussian", "toeplitz", "both"}))
      ->capture_default_str();
  bench->add_option("--sigma", bo.sigma, "Toeplitz bump width (0 = m/50)")->capture_default_str();
  bench->add_option("--ratios", bo.ratios, "lambda/lambda_max values")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--trials", bo.trials, "Instances per setup")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--target-rho", bo.target_rho, "Calibration target success fraction")
      ->capture_default_str();
  bench->add_option("--target-tau", bo.target_tau, "Calibration gap threshold")
      ->capture_default_str();
  bench->add_option("--flop-budget", bo.flop_budget,
                    "Use this budget directly instead of calibrating (0 = calibrate)")
      ->capture_default_str();
  bench->add_option("--max-iter", bo.max_iter, "Iteration cap per solve")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help() << std::flush;
    return 2;
  }

  try {
    if (solve->parsed()) return run_solve(g, so);
    if (radius->parsed()) return run_radius_ratio(g, ro);
    if (bench->parsed()) return run_benchmark(g, bo);
    std::cerr << "usage error: a subcommand is required\n" << app.help() << std::flush;
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
