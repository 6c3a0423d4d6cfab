// qamp: quadratic-kernel regression experiments from the command line.
//
// Subcommands:
//   expand    CSV feature matrix -> expanded (optionally normalized) CSV
//   solve     solve one dataset directory with a chosen solver
//   bayes     planted-model benchmark (traces + summary.json)
//   eb        sinusoid-family benchmark over measurement rates
//   spectrum  singular-value sweep of the normalized design

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qamp/experiments.hpp"
#include "qamp/matrix_io.hpp"
#include "qamp/rng.hpp"
#include "qamp/synthetic.hpp"

namespace {

using namespace qamp;

nlohmann::json load_json(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  nlohmann::json j;
  in >> j;
  return j;
}

ExperimentSpec spec_from_cli(const std::string& kind, const std::string& spec_file,
                             std::optional<std::uint64_t> seed,
                             const std::optional<std::string>& out,
                             const std::vector<std::string>& solvers,
                             std::optional<int> threads) {
  ExperimentSpec spec = spec_file.empty() ? default_experiment_spec(kind)
                                          : experiment_spec_from_json(load_json(spec_file));
  if (spec.kind != kind)
    throw std::invalid_argument("spec kind '" + spec.kind + "' does not match subcommand '" +
                                kind + "'");
  if (seed) spec.seed = *seed;
  if (out) spec.out_dir = *out;
  if (threads) spec.threads = *threads;
  if (!solvers.empty()) {
    spec.solvers.clear();
    for (const std::string& s : solvers) spec.solvers.push_back(solver_kind_from_string(s));
  }
  return spec;
}

int run_expand(const std::string& in_file, const std::string& out_file, bool normalize,
               bool binary_in, bool binary_out) {
  const Eigen::MatrixXd x =
      binary_in ? read_binary_matrix(in_file) : read_csv_matrix(in_file);
  ExpandedDesign design = expand_quadratic(x);
  if (normalize) design = normalize_columns(std::move(design));
  if (binary_out)
    write_binary_matrix(out_file, design.data);
  else
    write_csv_matrix(out_file, design.data);
  std::fprintf(stderr, "expanded %ld x %ld -> %ld x %ld%s\n", static_cast<long>(x.rows()),
               static_cast<long>(x.cols()), static_cast<long>(design.rows()),
               static_cast<long>(design.cols()), normalize ? " (normalized)" : "");
  return 0;
}

int run_gen(const std::string& kind, int n, int m, int k_test, double noise_var,
            std::uint64_t seed, const std::string& out_dir, const std::string& priors_file) {
  Dataset data;
  nlohmann::json spec_json{{"kind", kind}, {"n", n}, {"m", m}, {"k_test", k_test},
                           {"noise_var", noise_var}, {"seed", seed}};
  if (kind == "bayes") {
    BayesModelSpec spec;
    spec.n = n;
    spec.m = m;
    spec.noise_var = noise_var;
    spec.priors =
        priors_file.empty() ? default_planted_priors() : prior_set_from_json(load_json(priors_file));
    spec.seed = seed;
    spec_json["priors"] = to_json(spec.priors);
    data = gen_bayes_dataset(spec, k_test);
  } else if (kind == "sinusoid") {
    SinusoidSpec spec = default_sinusoid_spec(n, m, seed);
    spec.noise_var = noise_var;
    spec_json["rho_prior"] = {{"p", spec.rho_prior.p}, {"tau", spec.rho_prior.tau}};
    data = gen_sinusoid_dataset(spec, k_test);
  } else {
    throw std::invalid_argument("gen: kind must be bayes or sinusoid");
  }
  save_dataset(out_dir, data, spec_json);
  std::fprintf(stderr, "wrote %s dataset (%d train + %d test rows, %d features) to %s\n",
               kind.c_str(), m - k_test, k_test, n, out_dir.c_str());
  return 0;
}

int run_solve(const std::string& data_dir, const std::string& solver_name,
              const std::string& out_file, const std::string& config_file,
              const std::string& priors_file, const std::string& priors_log, bool timing) {
  const SolverKind kind = solver_kind_from_string(solver_name);
  const Dataset data = load_dataset(data_dir);
  const ExpandedDesign train = normalize_columns(expand_quadratic(data.x_train));
  const ExpandedDesign test = expand_quadratic(data.x_test);

  AmpConfig amp_cfg;
  EbConfig eb_cfg;
  LassoExperimentConfig lasso_cfg;
  GroupPriorSet priors = default_planted_priors();
  if (!config_file.empty()) {
    // solver options ride in an experiment-spec shaped document
    nlohmann::json j = load_json(config_file);
    if (!j.contains("kind")) j["kind"] = "bayes";
    const ExperimentSpec spec = experiment_spec_from_json(j);
    amp_cfg = spec.amp;
    eb_cfg = spec.eb;
    lasso_cfg = spec.lasso;
    priors = spec.priors;
  }
  if (!priors_file.empty()) priors = prior_set_from_json(load_json(priors_file));

  TraceTargets targets;
  targets.truth_original = data.truth ? &*data.truth : nullptr;
  targets.test_design = &test;
  targets.y_test = &data.y_test;

  SolverResult result;
  double cv_lambda = std::numeric_limits<double>::quiet_NaN();
  EbDiagnostics diag;
  switch (kind) {
    case SolverKind::Amp:
      result = amp_run(train, data.y_train, priors_for_normalized_design(priors, train),
                       amp_cfg, &targets);
      break;
    case SolverKind::EbAmp:
      result = eb_amp_run(train, data.y_train, amp_cfg, eb_cfg, &targets, &diag);
      break;
    case SolverKind::Lasso: {
      const std::vector<double> grid =
          default_lambda_grid(train, data.y_train, lasso_cfg.grid_points,
                              lasso_cfg.grid_lo_factor, lasso_cfg.grid_hi_factor);
      LassoConfig cfg;
      cfg.equalize = true;
      cfg.exempt_dc = lasso_cfg.exempt_dc;
      cfg.max_iters = lasso_cfg.cv_max_iters;
      cfg.tol = lasso_cfg.cv_tol;
      const CvResult cv = cross_validate_lambda(train, data.y_train, grid, lasso_cfg.cv_folds,
                                                cfg, derive_seed(1, 10));
      cfg.max_iters = lasso_cfg.max_iters;
      cfg.tol = lasso_cfg.tol;
      cfg.lambdas = {cv.lambda, cv.lambda, cv.lambda, cv.lambda};
      cv_lambda = cv.lambda;
      result = lasso_cd(train, data.y_train, cfg, &targets);
      break;
    }
    case SolverKind::Pseudoinverse:
      result = pseudoinverse_solve(train, data.y_train);
      break;
  }

  if (!priors_log.empty() && kind == SolverKind::EbAmp) {
    std::ofstream log(priors_log);
    for (const GroupPriorSet& p : diag.priors_per_iteration) log << to_json(p).dump() << '\n';
  }

  nlohmann::json out{
      {"solver", to_string(kind)},
      {"iterations", result.iterations_used},
      {"converged", result.converged},
      {"diverged", result.diverged},
      {"test_mse", test_mse(test, result.theta_hat_original, data.y_test)},
      {"theta_hat", coefficients_to_json(result.theta_hat_original)},
      {"theta_hat_normalized",
       std::vector<double>(result.theta_hat_normalized.data(),
                           result.theta_hat_normalized.data() +
                               result.theta_hat_normalized.size())},
  };
  if (data.truth)
    out["coeff_mse"] = (result.theta_hat_original.stacked() - data.truth->stacked()).squaredNorm() /
                       static_cast<double>(train.cols());
  if (kind == SolverKind::Lasso) out["cv_lambda"] = cv_lambda;
  if (result.diverged) out["diverged_at"] = result.diverged_at;
  if (timing) out["seconds"] = result.seconds;

  std::ofstream of(out_file);
  if (!of) throw std::runtime_error("cannot write " + out_file);
  of << out.dump(2) << '\n';
  std::fprintf(stderr, "%s: %d iterations, test MSE %g (result in %s)\n",
               to_string(kind).c_str(), result.iterations_used,
               out.at("test_mse").get<double>(), out_file.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadratic-kernel regression with AMP, empirical Bayes, and baselines"};
  app.require_subcommand(1);

  // expand
  std::string in_file, out_file;
  bool normalize = false, binary_in = false, binary_out = false;
  auto* expand = app.add_subcommand("expand", "expand a feature CSV into the quadratic design");
  expand->add_option("--in", in_file, "input matrix (CSV, or binary with --binary-in)")
      ->required();
  expand->add_option("--out", out_file, "output design matrix")->required();
  expand->add_flag("--normalize", normalize, "normalize columns to unit norm");
  expand->add_flag("--binary-in", binary_in, "read the binary matrix format");
  expand->add_flag("--binary-out", binary_out, "write the binary matrix format");

  // gen
  std::string gen_kind = "bayes", gen_out = "dataset";
  int gen_n = 30, gen_m = 580, gen_k = 60;
  double gen_noise = 0.004;
  std::uint64_t gen_seed = 1;
  std::string gen_priors;
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset directory");
  gen->add_option("--kind", gen_kind, "bayes | sinusoid");
  gen->add_option("--n", gen_n, "feature count");
  gen->add_option("--m", gen_m, "total samples (train + test)");
  gen->add_option("--k", gen_k, "held-out test rows");
  gen->add_option("--noise-var", gen_noise, "measurement noise variance");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--priors", gen_priors, "prior-set JSON for the bayes model");

  // solve
  std::string data_dir, solver_name = "amp", result_file = "result.json";
  std::string config_file, priors_file, priors_log;
  bool timing = false;
  auto* solve = app.add_subcommand("solve", "run one solver on a dataset directory");
  solve->add_option("--data", data_dir, "dataset directory (x_train.csv, y_train.csv, ...)")
      ->required();
  solve->add_option("--solver", solver_name, "amp | eb_amp | lasso | pseudoinverse");
  solve->add_option("--out", result_file, "result JSON path");
  solve->add_option("--config", config_file, "experiment-spec JSON carrying solver options");
  solve->add_option("--priors", priors_file, "prior-set JSON for the amp solver");
  solve->add_option("--priors-log", priors_log, "JSONL file for per-iteration learned priors");
  solve->add_flag("--timing", timing, "include wall time in the result (breaks rerun hashes)");

  // experiments
  std::string spec_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> exp_out;
  std::optional<int> threads;
  std::vector<std::string> solver_names;
  auto add_experiment = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--spec", spec_file, "experiment spec JSON (defaults used when omitted)");
    cmd->add_option("--seed", seed, "override the master seed");
    cmd->add_option("--out", exp_out, "override the output directory");
    cmd->add_option("--threads", threads, "worker pool size (0 = hardware)");
    cmd->add_option("--solvers", solver_names, "override the solver list")->delimiter(',');
    return cmd;
  };
  auto* bayes = add_experiment("bayes", "planted quadratic-model benchmark");
  auto* eb = add_experiment("eb", "sinusoid-family benchmark over measurement rates");
  bool priors_log_flag = false;
  eb->add_flag("--priors-log", priors_log_flag, "write per-iteration learned priors (JSONL)");
  auto* spectrum = add_experiment("spectrum", "singular-value sweep");
  bool keep_all_svs = false;
  spectrum->add_flag("--keep-all-svs", keep_all_svs,
                     "also write every trial's full spectrum (spectra_*.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (expand->parsed()) return run_expand(in_file, out_file, normalize, binary_in, binary_out);
    if (gen->parsed())
      return run_gen(gen_kind, gen_n, gen_m, gen_k, gen_noise, gen_seed, gen_out, gen_priors);
    if (solve->parsed())
      return run_solve(data_dir, solver_name, result_file, config_file, priors_file, priors_log,
                       timing);
    const char* kind = bayes->parsed() ? "bayes" : (eb->parsed() ? "eb" : "spectrum");
    (void)spectrum;
    ExperimentSpec spec = spec_from_cli(kind, spec_file, seed, exp_out, solver_names, threads);
    if (priors_log_flag) spec.priors_log = true;
    if (keep_all_svs) spec.keep_all_svs = true;
    const nlohmann::json summary = run_experiment(spec);
    std::fprintf(stderr, "wrote %s\n", (std::filesystem::path(spec.out_dir) / "summary.json")
                                           .string()
                                           .c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
