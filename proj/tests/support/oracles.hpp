#pragma once

// Independent reference computations for tests. Everything here recomputes
// results by brute force (quadrature, elementwise loops, proximal gradient)
// rather than calling the code paths under test.

#include <Eigen/Dense>
#include <functional>

#include "qamp/expansion.hpp"

namespace qamp::test {

// Recursive adaptive Simpson on [a, b] with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

// Posterior mean E[theta | q] for theta ~ (1-p) delta_0 + p N(0, tau),
// q = theta + N(0, sigma2), computed by numerical quadrature of the
// continuous component (log-scaled so extreme parameters do not underflow).
double bg_posterior_mean_quadrature(double q, double sigma2, double p, double tau);

// Central finite difference with step h.
double central_difference(const std::function<double(double)>& f, double x, double h);

// Scalar double-loop evaluation of the quadratic basis at one row:
// dc + sum linear_n x_n + sum quadratic_n x_n^2 + sum cross_(n1,n2) x_n1 x_n2.
double naive_quadratic_eval(const Eigen::VectorXd& row, const GroupedCoefficients& theta);

// Proximal-gradient (ISTA) minimizer of
//   0.5 ||y - X theta||^2 + sum_l lambda_l |theta_l|,
// an independent route to the LASSO objective value.
Eigen::VectorXd ista_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& lambda_per_col, int iters);

double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& theta, const Eigen::VectorXd& lambda_per_col);

}  // namespace qamp::test
