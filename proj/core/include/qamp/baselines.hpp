#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "qamp/amp.hpp"
#include "qamp/expansion.hpp"

namespace qamp {

// Penalized objective: (1/2)||y - X theta||^2 + sum_j lambda_j ||theta_j||_1
// with one lambda per coefficient group (dc, linear, quadratic, cross).
struct LassoConfig {
  std::array<double, 4> lambdas{0.0, 0.0, 0.0, 0.0};
  int max_iters = 50000;  // coordinate-descent sweeps
  double tol = 1e-10;     // max absolute coordinate change per sweep
  bool equalize = false;  // use lambdas[0] for every group
  bool exempt_dc = false; // leave the DC coefficient unpenalized
};

// sign(x) * max(|x| - lambda, 0)
double soft_threshold(double x, double lambda);

// Cyclic coordinate descent on the grouped objective. Requires a normalized
// design (unit columns give the closed-form update
// theta_l <- S(theta_l + X_l^T r, lambda)). The optional targets enrich the
// per-sweep trace like amp_run does.
SolverResult lasso_cd(const ExpandedDesign& design, const Eigen::VectorXd& y,
                      const LassoConfig& config, const TraceTargets* targets = nullptr);

// Max KKT violation of the objective at theta (normalized scale):
// active coordinates need X_l^T r = lambda sign(theta_l), inactive ones
// |X_l^T r| <= lambda.
double lasso_kkt_violation(const ExpandedDesign& design, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& theta_normalized, const LassoConfig& config);

// Log-spaced grid of `points` values spanning [lo_factor, hi_factor] times
// max_l |X_l^T y|.
std::vector<double> default_lambda_grid(const ExpandedDesign& design, const Eigen::VectorXd& y,
                                        int points = 20, double lo_factor = 1e-4,
                                        double hi_factor = 1.0);

struct CvPoint {
  double lambda = 0.0;
  double mean_val_mse = 0.0;
  double std_val_mse = 0.0;
};

struct CvResult {
  double lambda = 0.0;  // grid value with the lowest mean validation MSE
  std::vector<CvPoint> curve;
};

// k-fold cross-validation over an equalized-lambda grid. Folds are assigned
// by a seeded permutation; each fold's training rows are re-normalized
// before fitting and predictions are scored in the original scale.
CvResult cross_validate_lambda(const ExpandedDesign& design, const Eigen::VectorXd& y,
                               const std::vector<double>& grid, int folds,
                               const LassoConfig& config, std::uint64_t seed);

void write_cv_curve_csv(const std::filesystem::path& file, const CvResult& cv);

// Minimum-norm least squares via SVD; singular values below
// 1e-10 * sigma_max are truncated. Accepts normalized or raw designs.
SolverResult pseudoinverse_solve(const ExpandedDesign& design, const Eigen::VectorXd& y);

}  // namespace qamp
