#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qamp/amp.hpp"
#include "qamp/priors.hpp"

namespace qamp {

struct EbConfig {
  int em_steps_per_amp_iter = 5;  // 0 disables learning entirely
  double p_min = 1e-4;
  double p_max = 1.0;
  double tau_min = 1e-8;
  double tau_max = 1e4;
  GroupPriorSet init{GaussianPrior{1.0}, BgPrior{0.1, 1.0}, BgPrior{0.1, 1.0},
                     BgPrior{0.1, 1.0}};
};

struct EmUpdateResult {
  BgPrior prior;
  // Marginal log-likelihood sum log[(1-p) N(q;0,s) + p N(q;0,tau+s)] before
  // the first step and after each step; EM guarantees it never decreases.
  std::vector<double> loglik;
};

// Scalar-channel marginal log-likelihood of a BG prior.
double bg_marginal_loglik(const Eigen::VectorXd& q, double sigma2, const BgPrior& prior);

// `em_steps_per_amp_iter` rounds of EM on the group's pseudo-data. Each round:
//   gamma_i = P(nonzero | q_i)  under the current prior
//   p   <- clamp(mean gamma_i)
//   tau <- clamp( sum gamma_i E[theta^2 | q_i, nonzero] / sum gamma_i )
// with E[theta^2 | q, nonzero] = tau s/(tau+s) + (q tau/(tau+s))^2 under the
// pre-update prior. Parameters are clamped into the configured bounds.
EmUpdateResult em_update_bg(const Eigen::VectorXd& q_group, double sigma2, BgPrior current,
                            const EbConfig& config);

struct EbDiagnostics {
  std::vector<GroupPriorSet> priors_per_iteration;
  // most negative log-likelihood change seen over all EM steps of the run;
  // ~0 or positive when EM behaves
  double min_loglik_delta = 0.0;
};

// amp_run with the group priors refit on q^t before each denoising step.
// The three BG groups run EM; the single-sample DC group uses the moment
// estimate tau = clamp(q_dc^2 - sigma2). With em_steps_per_amp_iter == 0
// this is bit-identical to amp_run(design, y, config.init, amp_config).
SolverResult eb_amp_run(const ExpandedDesign& design, const Eigen::VectorXd& y,
                        const AmpConfig& amp_config, const EbConfig& eb_config,
                        const TraceTargets* targets = nullptr,
                        EbDiagnostics* diagnostics = nullptr);

}  // namespace qamp
