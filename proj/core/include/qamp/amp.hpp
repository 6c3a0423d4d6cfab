#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qamp/expansion.hpp"
#include "qamp/priors.hpp"

namespace qamp {

enum class AmpVariant { Simultaneous, Sweep };

struct AmpConfig {
  int max_iters = 300;
  // 1 = undamped; new iterates blended as d*new + (1-d)*old. 0.5 keeps the
  // simultaneous variant stable on quadratic-kernel designs, whose leading
  // singular value sits well above the bulk.
  double damping = 0.5;
  double tol = 1e-8;  // relative change of theta between iterations
  AmpVariant variant = AmpVariant::Simultaneous;
  std::uint64_t seed = 0;  // sweep permutation stream
};

struct TraceRow {
  int iteration = 0;
  double residual_norm = 0.0;
  double sigma2_eff = 0.0;
  std::optional<double> coeff_mse;  // original-scale ||theta_hat - theta||^2 / L, truth known
  std::optional<double> test_mse;   // held-out prediction MSE, test set known
};

struct AmpState {
  Eigen::VectorXd theta;     // length L, normalized scale
  Eigen::VectorXd residual;  // length M
  double sigma2_eff = 0.0;   // effective scalar-channel noise variance
  int iteration = 0;
  std::vector<TraceRow> trace;
};

// Thrown by a step when an iterate goes non-finite.
struct AmpDivergence : std::runtime_error {
  explicit AmpDivergence(int at)
      : std::runtime_error("AMP iterate non-finite at iteration " + std::to_string(at)),
        iteration(at) {}
  int iteration;
};

struct SolverResult {
  Eigen::VectorXd theta_hat_normalized;
  GroupedCoefficients theta_hat_original;
  int iterations_used = 0;
  bool converged = false;
  bool diverged = false;
  int diverged_at = -1;
  std::vector<TraceRow> trace;
  // last finite iterate, for post-run diagnostics
  Eigen::VectorXd final_residual;
  double final_sigma2_eff = 0.0;
  double seconds = 0.0;  // wall time; kept out of deterministic report files
};

// Optional per-iteration trace enrichment. `truth_original` fills coeff_mse;
// the test pair fills test_mse (test design must be unnormalized).
struct TraceTargets {
  const GroupedCoefficients* truth_original = nullptr;
  const ExpandedDesign* test_design = nullptr;
  const Eigen::VectorXd* y_test = nullptr;
};

// ||r||^2 / m with a 1e-12 floor.
double estimate_effective_noise(const Eigen::VectorXd& residual, Eigen::Index m);

// theta0 = 0, r0 = y, sigma2 = ||y||^2 / M; trace gets its first row.
AmpState amp_init(const ExpandedDesign& design, const Eigen::VectorXd& y);

// One simultaneous iteration:
//   q      = X^T r + theta
//   theta+ = eta(q; sigma2)            (blended by damping)
//   r+     = y - X theta+ + (L/M) <eta'(q)> r   (blended by damping)
//   sigma2 = ||r+||^2 / M
// Throws AmpDivergence if an iterate goes non-finite.
void amp_step(AmpState& state, const ExpandedDesign& design, const Eigen::VectorXd& y,
              const GroupPriorSet& priors, const AmpConfig& config);

// Sweep variant: the same fixed-point equations, but coordinates are
// denoised one at a time in a fresh random permutation (derived from
// config.seed and the iteration number), with the residual updated after
// each coordinate so later coordinates see earlier updates.
void amp_sweep_step(AmpState& state, const ExpandedDesign& design, const Eigen::VectorXd& y,
                    const GroupPriorSet& priors, const AmpConfig& config);

// Runs the configured variant until the relative change of theta drops
// below config.tol or max_iters is reached. Divergence is reported in the
// result (diverged flag + last finite iterate), never thrown.
SolverResult amp_run(const ExpandedDesign& design, const Eigen::VectorXd& y,
                     const GroupPriorSet& priors, const AmpConfig& config,
                     const TraceTargets* targets = nullptr);

// Trace CSV: iteration,residual_norm,sigma2_eff,coeff_mse,test_mse with
// empty fields where a value is unknown.
void write_trace_csv(const std::filesystem::path& file, const std::vector<TraceRow>& trace);

namespace detail {

// Hook invoked with (q, sigma2) after the pseudo-data is formed and before
// denoising; may update the priors in place. Empirical-Bayes runs use this
// to refit hyperparameters each iteration.
using PriorRefresh = std::function<void(const Eigen::VectorXd&, double, GroupPriorSet&)>;

void amp_step_impl(AmpState& state, const ExpandedDesign& design, const Eigen::VectorXd& y,
                   GroupPriorSet& priors, const AmpConfig& config, const PriorRefresh* refresh);
void amp_sweep_step_impl(AmpState& state, const ExpandedDesign& design, const Eigen::VectorXd& y,
                         GroupPriorSet& priors, const AmpConfig& config,
                         const PriorRefresh* refresh);
SolverResult amp_run_impl(const ExpandedDesign& design, const Eigen::VectorXd& y,
                          GroupPriorSet priors, const AmpConfig& config,
                          const TraceTargets* targets, const PriorRefresh* refresh);

}  // namespace detail

}  // namespace qamp
