#include "qamp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "qamp/matrix_io.hpp"
#include "qamp/rng.hpp"
#include "qamp/synthetic.hpp"

namespace qamp {

namespace {

// Runs fn(0..count-1) on a small worker pool. Output slots are indexed, so
// scheduling cannot change results.
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

LassoConfig to_lasso_config(const LassoExperimentConfig& c, double lambda) {
  LassoConfig cfg;
  cfg.lambdas = {lambda, lambda, lambda, lambda};
  cfg.equalize = true;
  cfg.exempt_dc = c.exempt_dc;
  cfg.max_iters = c.max_iters;
  cfg.tol = c.tol;
  return cfg;
}

struct SolverOutcome {
  SolverResult result;
  double final_coeff_mse = std::numeric_limits<double>::quiet_NaN();
  double final_test_mse = std::numeric_limits<double>::quiet_NaN();
  double cv_lambda = std::numeric_limits<double>::quiet_NaN();
  double kkt = std::numeric_limits<double>::quiet_NaN();
  double min_em_loglik_delta = 0.0;
  CvResult cv;
  std::vector<GroupPriorSet> learned_priors;
};

// Solves one prepared instance with one solver; shared by both estimation
// experiments and the CLI.
SolverOutcome run_solver(SolverKind kind, const ExperimentSpec& spec,
                         const ExpandedDesign& train_design, const Eigen::VectorXd& y_train,
                         const ExpandedDesign& test_design, const Eigen::VectorXd& y_test,
                         const GroupedCoefficients* truth, std::uint64_t instance_seed) {
  TraceTargets targets;
  targets.truth_original = truth;
  targets.test_design = &test_design;
  targets.y_test = &y_test;

  SolverOutcome out;
  switch (kind) {
    case SolverKind::Amp:
      out.result = amp_run(train_design, y_train,
                           priors_for_normalized_design(spec.priors, train_design), spec.amp,
                           &targets);
      break;
    case SolverKind::EbAmp: {
      EbDiagnostics diag;
      out.result = eb_amp_run(train_design, y_train, spec.amp, spec.eb, &targets, &diag);
      out.min_em_loglik_delta = diag.min_loglik_delta;
      out.learned_priors = std::move(diag.priors_per_iteration);
      break;
    }
    case SolverKind::Lasso: {
      const std::vector<double> grid =
          default_lambda_grid(train_design, y_train, spec.lasso.grid_points,
                              spec.lasso.grid_lo_factor, spec.lasso.grid_hi_factor);
      LassoConfig cv_cfg = to_lasso_config(spec.lasso, 0.0);
      cv_cfg.max_iters = spec.lasso.cv_max_iters;
      cv_cfg.tol = spec.lasso.cv_tol;
      out.cv = cross_validate_lambda(train_design, y_train, grid, spec.lasso.cv_folds, cv_cfg,
                                     derive_seed(instance_seed, 10));
      const LassoConfig cfg = to_lasso_config(spec.lasso, out.cv.lambda);
      out.result = lasso_cd(train_design, y_train, cfg, &targets);
      out.cv_lambda = out.cv.lambda;
      out.kkt = lasso_kkt_violation(train_design, y_train, out.result.theta_hat_normalized, cfg);
      break;
    }
    case SolverKind::Pseudoinverse:
      out.result = pseudoinverse_solve(train_design, y_train);
      break;
  }

  if (truth)
    out.final_coeff_mse =
        (out.result.theta_hat_original.stacked() - truth->stacked()).squaredNorm() /
        static_cast<double>(train_design.cols());
  out.final_test_mse = test_mse(test_design, out.result.theta_hat_original, y_test);
  return out;
}

nlohmann::json outcome_to_json(SolverKind kind, const SolverOutcome& o, bool truth_known) {
  nlohmann::json j{
      {"solver", to_string(kind)},
      {"test_mse", o.final_test_mse},
      {"iterations", o.result.iterations_used},
      {"converged", o.result.converged},
      {"diverged", o.result.diverged},
  };
  if (truth_known) j["coeff_mse"] = o.final_coeff_mse;
  if (o.result.diverged) j["diverged_at"] = o.result.diverged_at;
  if (kind == SolverKind::Lasso) {
    j["cv_lambda"] = o.cv_lambda;
    j["kkt_violation"] = o.kkt;
  }
  if (kind == SolverKind::EbAmp) j["min_em_loglik_delta"] = o.min_em_loglik_delta;
  return j;
}

void write_summary(const std::filesystem::path& dir, const nlohmann::json& summary) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "summary.json");
  if (!out) throw std::runtime_error("cannot write summary.json under " + dir.string());
  out << summary.dump(2) << '\n';
}

void write_priors_log(const std::filesystem::path& file,
                      const std::vector<GroupPriorSet>& priors) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  for (const GroupPriorSet& p : priors) out << to_json(p).dump() << '\n';
}

}  // namespace

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Amp:
      return "amp";
    case SolverKind::EbAmp:
      return "eb_amp";
    case SolverKind::Lasso:
      return "lasso";
    case SolverKind::Pseudoinverse:
      return "pseudoinverse";
  }
  return "?";
}

SolverKind solver_kind_from_string(const std::string& s) {
  if (s == "amp") return SolverKind::Amp;
  if (s == "eb_amp") return SolverKind::EbAmp;
  if (s == "lasso") return SolverKind::Lasso;
  if (s == "pseudoinverse") return SolverKind::Pseudoinverse;
  throw std::invalid_argument("unknown solver '" + s + "'");
}

GroupPriorSet default_planted_priors() {
  GroupPriorSet p;
  p.dc = GaussianPrior{10.0};
  p.linear = BgPrior{0.2, 1.0};
  p.quadratic = BgPrior{0.2, 0.5};
  p.cross = BgPrior{0.03, 0.1};
  return p;
}

ExperimentSpec default_experiment_spec(const std::string& kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  if (kind == "eb") {
    spec.k_test = 200;
    spec.solvers = {SolverKind::EbAmp, SolverKind::Lasso, SolverKind::Pseudoinverse};
  } else if (kind == "spectrum") {
    spec.solvers.clear();
  } else if (kind != "bayes") {
    throw std::invalid_argument("unknown experiment kind '" + kind + "'");
  }
  return spec;
}

void validate(const ExperimentSpec& spec) {
  if (spec.kind != "bayes" && spec.kind != "eb" && spec.kind != "spectrum")
    throw std::invalid_argument("unknown experiment kind '" + spec.kind + "'");
  if (spec.kind == "bayes") {
    if (spec.solvers.empty())
      throw std::invalid_argument("bayes experiment needs at least one solver");
    if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (spec.n < 1 || spec.m_train < 1 || spec.k_test < 1)
      throw std::invalid_argument("bad dimensions");
  } else if (spec.kind == "eb") {
    if (spec.solvers.empty())
      throw std::invalid_argument("eb experiment needs at least one solver");
    if (spec.realizations < 1) throw std::invalid_argument("realizations must be >= 1");
    if (spec.rates.empty()) throw std::invalid_argument("eb experiment needs rates");
    for (double r : spec.rates)
      if (!(r > 0.0)) throw std::invalid_argument("rates must be > 0");
  } else {
    if (spec.spectrum_trials < 1) throw std::invalid_argument("spectrum trials must be >= 1");
    if (spec.spectrum_dims.empty()) throw std::invalid_argument("spectrum needs (M,N) pairs");
  }
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json j{
      {"kind", spec.kind},
      {"seed", spec.seed},
      {"out_dir", spec.out_dir},
      {"threads", spec.threads},
      {"trials", spec.trials},
      {"n", spec.n},
      {"m_train", spec.m_train},
      {"k_test", spec.k_test},
      {"noise_var", spec.noise_var},
      {"priors", to_json(spec.priors)},
      {"rates", spec.rates},
      {"realizations", spec.realizations},
      {"sinusoid_noise_var", spec.sinusoid_noise_var},
      {"rho_p", spec.rho_p},
      {"rho_tau", spec.rho_tau},
      {"priors_log", spec.priors_log},
      {"spectrum_trials", spec.spectrum_trials},
      {"keep_all_svs", spec.keep_all_svs},
      {"amp",
       {{"max_iters", spec.amp.max_iters},
        {"damping", spec.amp.damping},
        {"tol", spec.amp.tol},
        {"variant", spec.amp.variant == AmpVariant::Sweep ? "sweep" : "simultaneous"},
        {"seed", spec.amp.seed}}},
      {"eb",
       {{"em_steps_per_amp_iter", spec.eb.em_steps_per_amp_iter},
        {"p_min", spec.eb.p_min},
        {"p_max", spec.eb.p_max},
        {"tau_min", spec.eb.tau_min},
        {"tau_max", spec.eb.tau_max},
        {"init", to_json(spec.eb.init)}}},
      {"lasso",
       {{"cv_folds", spec.lasso.cv_folds},
        {"grid_points", spec.lasso.grid_points},
        {"grid_lo_factor", spec.lasso.grid_lo_factor},
        {"grid_hi_factor", spec.lasso.grid_hi_factor},
        {"max_iters", spec.lasso.max_iters},
        {"tol", spec.lasso.tol},
        {"cv_max_iters", spec.lasso.cv_max_iters},
        {"cv_tol", spec.lasso.cv_tol},
        {"exempt_dc", spec.lasso.exempt_dc}}},
  };
  nlohmann::json solvers = nlohmann::json::array();
  for (SolverKind k : spec.solvers) solvers.push_back(to_string(k));
  j["solvers"] = solvers;
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& [m, n] : spec.spectrum_dims) dims.push_back({m, n});
  j["spectrum_dims"] = dims;
  return j;
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
  if (!j.contains("kind")) throw std::invalid_argument("experiment spec needs a \"kind\"");
  ExperimentSpec spec = default_experiment_spec(j.at("kind").get<std::string>());

  static const std::vector<std::string> known = {
      "kind", "seed", "out_dir", "threads", "trials", "n", "m_train", "k_test", "noise_var",
      "priors", "rates", "realizations", "sinusoid_noise_var", "rho_p", "rho_tau", "priors_log",
      "spectrum_trials", "keep_all_svs", "amp", "eb", "lasso", "solvers", "spectrum_dims"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown experiment spec key '" + key + "'");

  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  get("seed", spec.seed);
  get("out_dir", spec.out_dir);
  get("threads", spec.threads);
  get("trials", spec.trials);
  get("n", spec.n);
  get("m_train", spec.m_train);
  get("k_test", spec.k_test);
  get("noise_var", spec.noise_var);
  get("rates", spec.rates);
  get("realizations", spec.realizations);
  get("sinusoid_noise_var", spec.sinusoid_noise_var);
  get("rho_p", spec.rho_p);
  get("rho_tau", spec.rho_tau);
  get("priors_log", spec.priors_log);
  get("spectrum_trials", spec.spectrum_trials);
  get("keep_all_svs", spec.keep_all_svs);
  if (j.contains("priors")) spec.priors = prior_set_from_json(j.at("priors"));
  if (j.contains("solvers")) {
    spec.solvers.clear();
    for (const auto& s : j.at("solvers")) spec.solvers.push_back(solver_kind_from_string(s));
  }
  if (j.contains("spectrum_dims")) {
    spec.spectrum_dims.clear();
    for (const auto& d : j.at("spectrum_dims"))
      spec.spectrum_dims.emplace_back(d.at(0).get<Eigen::Index>(), d.at(1).get<Eigen::Index>());
  }
  if (j.contains("amp")) {
    const auto& a = j.at("amp");
    if (a.contains("max_iters")) spec.amp.max_iters = a.at("max_iters").get<int>();
    if (a.contains("damping")) spec.amp.damping = a.at("damping").get<double>();
    if (a.contains("tol")) spec.amp.tol = a.at("tol").get<double>();
    if (a.contains("seed")) spec.amp.seed = a.at("seed").get<std::uint64_t>();
    if (a.contains("variant")) {
      const auto v = a.at("variant").get<std::string>();
      if (v == "sweep")
        spec.amp.variant = AmpVariant::Sweep;
      else if (v == "simultaneous")
        spec.amp.variant = AmpVariant::Simultaneous;
      else
        throw std::invalid_argument("unknown amp variant '" + v + "'");
    }
  }
  if (j.contains("eb")) {
    const auto& e = j.at("eb");
    if (e.contains("em_steps_per_amp_iter"))
      spec.eb.em_steps_per_amp_iter = e.at("em_steps_per_amp_iter").get<int>();
    if (e.contains("p_min")) spec.eb.p_min = e.at("p_min").get<double>();
    if (e.contains("p_max")) spec.eb.p_max = e.at("p_max").get<double>();
    if (e.contains("tau_min")) spec.eb.tau_min = e.at("tau_min").get<double>();
    if (e.contains("tau_max")) spec.eb.tau_max = e.at("tau_max").get<double>();
    if (e.contains("init")) spec.eb.init = prior_set_from_json(e.at("init"));
  }
  if (j.contains("lasso")) {
    const auto& l = j.at("lasso");
    if (l.contains("cv_folds")) spec.lasso.cv_folds = l.at("cv_folds").get<int>();
    if (l.contains("grid_points")) spec.lasso.grid_points = l.at("grid_points").get<int>();
    if (l.contains("grid_lo_factor"))
      spec.lasso.grid_lo_factor = l.at("grid_lo_factor").get<double>();
    if (l.contains("grid_hi_factor"))
      spec.lasso.grid_hi_factor = l.at("grid_hi_factor").get<double>();
    if (l.contains("max_iters")) spec.lasso.max_iters = l.at("max_iters").get<int>();
    if (l.contains("tol")) spec.lasso.tol = l.at("tol").get<double>();
    if (l.contains("cv_max_iters")) spec.lasso.cv_max_iters = l.at("cv_max_iters").get<int>();
    if (l.contains("cv_tol")) spec.lasso.cv_tol = l.at("cv_tol").get<double>();
    if (l.contains("exempt_dc")) spec.lasso.exempt_dc = l.at("exempt_dc").get<bool>();
  }
  return spec;
}

nlohmann::json run_bayes_experiment(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.kind != "bayes") throw std::invalid_argument("run_bayes_experiment: wrong kind");
  const std::filesystem::path dir(spec.out_dir);
  std::filesystem::create_directories(dir);

  struct TrialOutput {
    std::uint64_t seed = 0;
    std::vector<SolverOutcome> outcomes;
  };
  std::vector<TrialOutput> trials(static_cast<std::size_t>(spec.trials));

  parallel_for(spec.trials, spec.threads, [&](int t) {
    TrialOutput& out = trials[static_cast<std::size_t>(t)];
    out.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(t));

    BayesModelSpec model;
    model.n = spec.n;
    model.m = spec.m_train + spec.k_test;
    model.noise_var = spec.noise_var;
    model.priors = spec.priors;
    model.seed = out.seed;
    const Dataset data = gen_bayes_dataset(model, spec.k_test);

    const ExpandedDesign train_design = normalize_columns(expand_quadratic(data.x_train));
    const ExpandedDesign test_design = expand_quadratic(data.x_test);

    for (SolverKind kind : spec.solvers) {
      SolverOutcome oc = run_solver(kind, spec, train_design, data.y_train, test_design,
                                    data.y_test, &*data.truth, out.seed);
      write_trace_csv(dir / ("trace_trial" + std::to_string(t) + "_" + to_string(kind) + ".csv"),
                      oc.result.trace);
      if (kind == SolverKind::Lasso)
        write_cv_curve_csv(dir / ("cv_trial" + std::to_string(t) + ".csv"), oc.cv);
      out.outcomes.push_back(std::move(oc));
    }
  });

  nlohmann::json trial_rows = nlohmann::json::array();
  std::map<std::string, std::vector<double>> coeff_mses, test_mses;
  for (int t = 0; t < spec.trials; ++t) {
    const TrialOutput& out = trials[static_cast<std::size_t>(t)];
    nlohmann::json row{{"trial", t}, {"seed", out.seed}};
    nlohmann::json solver_rows = nlohmann::json::array();
    for (std::size_t s = 0; s < spec.solvers.size(); ++s) {
      const SolverKind kind = spec.solvers[s];
      const SolverOutcome& oc = out.outcomes[s];
      solver_rows.push_back(outcome_to_json(kind, oc, true));
      coeff_mses[to_string(kind)].push_back(oc.final_coeff_mse);
      test_mses[to_string(kind)].push_back(oc.final_test_mse);
    }
    row["solvers"] = solver_rows;
    trial_rows.push_back(row);
  }

  nlohmann::json aggregate;
  for (SolverKind kind : spec.solvers) {
    const std::string name = to_string(kind);
    aggregate[name] = {{"median_coeff_mse", median(coeff_mses[name])},
                       {"mean_coeff_mse", mean(coeff_mses[name])},
                       {"median_test_mse", median(test_mses[name])},
                       {"mean_test_mse", mean(test_mses[name])}};
  }

  nlohmann::json summary{{"spec", to_json(spec)}, {"trials", trial_rows}, {"aggregate", aggregate}};
  write_summary(dir, summary);
  return summary;
}

nlohmann::json run_eb_experiment(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.kind != "eb") throw std::invalid_argument("run_eb_experiment: wrong kind");
  const std::filesystem::path dir(spec.out_dir);
  std::filesystem::create_directories(dir);
  const Eigen::Index l = column_count(spec.n);

  struct Cell {
    std::vector<SolverOutcome> outcomes;
    std::uint64_t seed = 0;
  };
  // realization-major grid per rate
  std::vector<std::vector<Cell>> grid(spec.rates.size());

  for (std::size_t ri = 0; ri < spec.rates.size(); ++ri) {
    grid[ri].resize(static_cast<std::size_t>(spec.realizations));
    const double rate = spec.rates[ri];
    const int m_train = static_cast<int>(std::lround(rate * static_cast<double>(l)));
    if (m_train < 2) throw std::invalid_argument("rate too small: no training rows");
    const std::uint64_t rate_seed = derive_seed(spec.seed, ri);

    parallel_for(spec.realizations, spec.threads, [&, ri, m_train, rate_seed](int i) {
      Cell& cell = grid[ri][static_cast<std::size_t>(i)];
      cell.seed = derive_seed(rate_seed, static_cast<std::uint64_t>(i));

      SinusoidSpec sine = default_sinusoid_spec(spec.n, m_train + spec.k_test, cell.seed);
      sine.noise_var = spec.sinusoid_noise_var;
      sine.rho_prior.p = spec.rho_p;
      sine.rho_prior.tau = spec.rho_tau > 0.0 ? spec.rho_tau : 1.0 / (spec.rho_p * spec.n);
      const Dataset data = gen_sinusoid_dataset(sine, spec.k_test);

      const ExpandedDesign train_design = normalize_columns(expand_quadratic(data.x_train));
      const ExpandedDesign test_design = expand_quadratic(data.x_test);

      for (SolverKind kind : spec.solvers) {
        SolverOutcome oc = run_solver(kind, spec, train_design, data.y_train, test_design,
                                      data.y_test, nullptr, cell.seed);
        if (kind == SolverKind::EbAmp && spec.priors_log)
          write_priors_log(dir / ("priors_rate" + std::to_string(ri) + "_real" +
                                  std::to_string(i) + ".jsonl"),
                           oc.learned_priors);
        cell.outcomes.push_back(std::move(oc));
      }
    });
  }

  nlohmann::json rate_rows = nlohmann::json::array();
  std::ofstream table(dir / "table.csv");
  if (!table) throw std::runtime_error("cannot write table.csv under " + dir.string());
  table << "rate,m_train";
  for (SolverKind kind : spec.solvers) table << ',' << to_string(kind);
  table << '\n';

  double min_em_delta = 0.0;
  for (std::size_t ri = 0; ri < spec.rates.size(); ++ri) {
    const double rate = spec.rates[ri];
    const int m_train = static_cast<int>(std::lround(rate * static_cast<double>(l)));
    nlohmann::json row{{"rate", rate}, {"m_train", m_train}};
    nlohmann::json per_solver;
    table << fmt(rate) << ',' << m_train;
    for (std::size_t s = 0; s < spec.solvers.size(); ++s) {
      const std::string name = to_string(spec.solvers[s]);
      std::vector<double> mses;
      nlohmann::json values = nlohmann::json::array();
      bool any_diverged = false;
      for (int i = 0; i < spec.realizations; ++i) {
        const SolverOutcome& oc = grid[ri][static_cast<std::size_t>(i)].outcomes[s];
        mses.push_back(oc.final_test_mse);
        values.push_back(oc.final_test_mse);
        any_diverged = any_diverged || oc.result.diverged;
        min_em_delta = std::min(min_em_delta, oc.min_em_loglik_delta);
      }
      const double med = median(mses);
      per_solver[name] = {{"median_test_mse", med}, {"test_mse", values},
                          {"any_diverged", any_diverged}};
      table << ',' << fmt(med);
    }
    table << '\n';
    row["solvers"] = per_solver;
    rate_rows.push_back(row);
  }
  if (!table) throw std::runtime_error("write failed for table.csv");
  table.close();

  nlohmann::json summary{{"spec", to_json(spec)},
                         {"rates", rate_rows},
                         {"min_em_loglik_delta", min_em_delta}};
  write_summary(dir, summary);
  return summary;
}

nlohmann::json run_spectrum_experiment(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.kind != "spectrum") throw std::invalid_argument("run_spectrum_experiment: wrong kind");
  const std::filesystem::path dir(spec.out_dir);
  std::filesystem::create_directories(dir);

  const std::vector<SpectrumReport> reports =
      spectrum_table(spec.spectrum_dims, spec.spectrum_trials, spec.seed, spec.keep_all_svs);
  write_spectrum_csv(dir / "table.csv", reports);

  if (spec.keep_all_svs) {
    // one file per configuration, one row of singular values per trial
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const SpectrumReport& r = reports[i];
      Eigen::MatrixXd spectra(static_cast<Eigen::Index>(r.all_svs.size()),
                              r.all_svs.empty() ? 0 : r.all_svs.front().size());
      for (std::size_t t = 0; t < r.all_svs.size(); ++t)
        spectra.row(static_cast<Eigen::Index>(t)) = r.all_svs[t].transpose();
      write_csv_matrix(dir / ("spectra_row" + std::to_string(i) + "_m" + std::to_string(r.m) +
                              "_n" + std::to_string(r.n) + ".csv"),
                       spectra);
    }
  }

  nlohmann::json rows = nlohmann::json::array();
  for (const SpectrumReport& r : reports) {
    rows.push_back({{"m", r.m},
                    {"n", r.n},
                    {"l", r.l},
                    {"sigma1_sq_empirical", r.sigma1_sq_empirical},
                    {"sigma1_sq_pred", r.sigma1_sq_predicted},
                    {"sigma2_sq_mean", r.sigma2_sq_mean},
                    {"trials", r.trials}});
  }
  nlohmann::json summary{{"spec", to_json(spec)}, {"rows", rows}};
  write_summary(dir, summary);
  return summary;
}

nlohmann::json run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  if (spec.kind == "bayes") return run_bayes_experiment(spec);
  if (spec.kind == "eb") return run_eb_experiment(spec);
  return run_spectrum_experiment(spec);
}

}  // namespace qamp
