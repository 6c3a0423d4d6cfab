#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qamp/amp.hpp"
#include "qamp/baselines.hpp"
#include "qamp/empirical_bayes.hpp"
#include "qamp/priors.hpp"
#include "qamp/spectrum.hpp"

namespace qamp {

enum class SolverKind { Amp, EbAmp, Lasso, Pseudoinverse };

std::string to_string(SolverKind k);
SolverKind solver_kind_from_string(const std::string& s);

// Planted-model coefficient priors used by the bayes experiment: DC N(0,10),
// linear 0.2 N(0,1), quadratic 0.2 N(0,0.5), cross 0.03 N(0,0.1).
GroupPriorSet default_planted_priors();

// Cross-validation / LASSO controls for experiment runs. The CV path uses
// its own, looser stopping pair: fold fits only rank lambdas, so grinding
// them to the final-fit tolerance buys nothing.
struct LassoExperimentConfig {
  int cv_folds = 5;
  int grid_points = 20;
  double grid_lo_factor = 1e-4;
  double grid_hi_factor = 1.0;
  int max_iters = 50000;
  double tol = 1e-10;
  int cv_max_iters = 5000;
  double cv_tol = 1e-6;
  bool exempt_dc = false;
};

// A fully resolved experiment description. Reports embed its JSON form, so a
// report alone is enough to reproduce the run.
struct ExperimentSpec {
  std::string kind;  // "bayes" | "eb" | "spectrum"
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 0;  // worker pool size; 0 = hardware concurrency

  // planted quadratic model (kind == "bayes")
  int trials = 5;
  int n = 30;
  int m_train = 520;
  int k_test = 60;
  double noise_var = 0.004;
  GroupPriorSet priors = default_planted_priors();
  std::vector<SolverKind> solvers{SolverKind::Amp, SolverKind::Lasso};

  // sinusoid family (kind == "eb"); measurement count per rate is
  // round(rate * L)
  std::vector<double> rates{0.14, 0.28, 0.56};
  int realizations = 20;
  double sinusoid_noise_var = 1e-4;
  double rho_p = 0.05;
  double rho_tau = 0.0;  // 0 = derive as 1 / (rho_p * n)
  bool priors_log = false;

  // spectrum sweep (kind == "spectrum")
  std::vector<std::pair<Eigen::Index, Eigen::Index>> spectrum_dims = default_spectrum_dims();
  int spectrum_trials = 20;
  bool keep_all_svs = false;

  AmpConfig amp;
  EbConfig eb;
  LassoExperimentConfig lasso;
};

// Kind-appropriate defaults ("eb" uses k_test=200 and all three solvers).
ExperimentSpec default_experiment_spec(const std::string& kind);

nlohmann::json to_json(const ExperimentSpec& spec);
// Starts from default_experiment_spec(j["kind"]) and overrides any field
// present in j. Unknown keys are an error.
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);

// Throws std::invalid_argument on an unusable spec (empty solver list, bad
// dimensions, ...).
void validate(const ExperimentSpec& spec);

// Planted-model benchmark. Per trial: generate, solve with each configured
// solver, write trace CSVs (trace_trial<t>_<solver>.csv) and cv curves; then
// summary.json with per-trial results and per-solver mean/median final MSEs.
// Returns the summary document.
nlohmann::json run_bayes_experiment(const ExperimentSpec& spec);

// Sinusoid-family benchmark over measurement rates. Writes table.csv
// (rate,lasso,eb_amp,pseudoinverse medians) and summary.json.
nlohmann::json run_eb_experiment(const ExperimentSpec& spec);

// Singular-value sweep. Writes table.csv (Table-style columns) and
// summary.json.
nlohmann::json run_spectrum_experiment(const ExperimentSpec& spec);

// Dispatches on spec.kind.
nlohmann::json run_experiment(const ExperimentSpec& spec);

}  // namespace qamp
