#pragma once

#include <Eigen/Dense>
#include <vector>

#include <json.hpp>

#include "qamp/expansion.hpp"

namespace qamp {

// Bernoulli-Gaussian (spike-and-slab) prior: (1-p) delta_0 + p N(0, tau).
struct BgPrior {
  double p = 0.1;
  double tau = 1.0;
};

// Zero-mean Gaussian prior with variance tau.
struct GaussianPrior {
  double tau = 1.0;
};

// One prior per coefficient group of the quadratic design.
struct GroupPriorSet {
  GaussianPrior dc;
  BgPrior linear;
  BgPrior quadratic;
  BgPrior cross;
};

// Prior parameters are clamped on use (p into [1e-6, 1], tau to >= 1e-12) so
// that hyperparameter updates can never hand the denoisers a degenerate
// distribution.
inline constexpr double kMinNonzeroProb = 1e-6;
inline constexpr double kMinPriorVariance = 1e-12;

BgPrior clamped(BgPrior prior);
GaussianPrior clamped(GaussianPrior prior);

// Posterior nonzero probability P(theta != 0 | q) for the scalar channel
// q = theta + N(0, sigma2) under a BG prior. Computed in log space; the
// exponent q^2 tau / (2 sigma2 (tau + sigma2)) overflows exp() long before
// it overflows a double.
double bg_nonzero_posterior(double q, double sigma2, const BgPrior& prior);

// E[theta | q] for the BG prior:
//   gamma(q) * (tau / (tau + sigma2)) * q.
double bg_denoise(double q, double sigma2, const BgPrior& prior);

// Analytic d/dq of bg_denoise. The Onsager term evaluates this once per
// column per iteration, so it is closed-form rather than differenced.
double bg_denoise_derivative(double q, double sigma2, const BgPrior& prior);

// Wiener shrinkage q * tau / (tau + sigma2); derivative is q-independent.
double gaussian_denoise(double q, double sigma2, const GaussianPrior& prior);
double gaussian_denoise_derivative(double sigma2, const GaussianPrior& prior);

struct GroupedDenoiseResult {
  Eigen::VectorXd theta;    // entrywise posterior means
  double mean_derivative;   // (1/L) * sum of entrywise derivatives
};

// Applies the group's denoiser to each entry of q. Groups must describe
// exactly q.size() columns.
GroupedDenoiseResult grouped_denoise(const Eigen::VectorXd& q, double sigma2,
                                     const GroupPriorSet& priors,
                                     const std::vector<ColumnGroup>& groups);

// Scalar denoise/derivative for a single column; used by the sweep updates.
double denoise_entry(const ColumnGroup& g, double q, double sigma2, const GroupPriorSet& priors);
double denoise_entry_derivative(const ColumnGroup& g, double q, double sigma2,
                                const GroupPriorSet& priors);

// Priors stated for original-scale coefficients, re-expressed for the
// normalized system the solver works in. theta'_l = theta_l * ||col_l||, so
// each group's variance is scaled by that group's mean squared column norm
// (within a group the norms concentrate tightly around their mean).
GroupPriorSet priors_for_normalized_design(const GroupPriorSet& priors,
                                           const ExpandedDesign& design);

// JSON document shape: {"dc":{"tau":..},"linear":{"p":..,"tau":..},
// "quadratic":{...},"cross":{...}}.
nlohmann::json to_json(const GroupPriorSet& priors);
GroupPriorSet prior_set_from_json(const nlohmann::json& j);

}  // namespace qamp
