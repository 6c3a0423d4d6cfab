#include "qamp/baselines.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "qamp/rng.hpp"
#include "qamp/synthetic.hpp"

namespace qamp {

namespace {

void check_lasso_inputs(const ExpandedDesign& design, const Eigen::VectorXd& y,
                        const LassoConfig& config) {
  if (!design.normalized)
    throw std::invalid_argument("lasso_cd: design must be column-normalized");
  if (y.size() != design.rows())
    throw std::invalid_argument("lasso_cd: measurement length does not match design rows");
  if (!y.allFinite()) throw std::invalid_argument("lasso_cd: non-finite measurements");
  for (double l : config.lambdas)
    if (!(l >= 0.0)) throw std::invalid_argument("lasso_cd: lambdas must be >= 0");
  if (config.max_iters < 1) throw std::invalid_argument("lasso_cd: max_iters must be >= 1");
  if (!(config.tol > 0.0)) throw std::invalid_argument("lasso_cd: tol must be > 0");
}

double group_lambda(const ColumnGroup& g, const LassoConfig& config) {
  if (g.kind == ColumnKind::Dc && config.exempt_dc) return 0.0;
  if (config.equalize) return config.lambdas[0];
  switch (g.kind) {
    case ColumnKind::Dc:
      return config.lambdas[0];
    case ColumnKind::Linear:
      return config.lambdas[1];
    case ColumnKind::Quadratic:
      return config.lambdas[2];
    case ColumnKind::Cross:
      return config.lambdas[3];
  }
  return 0.0;
}

Eigen::VectorXd per_column_lambdas(const ExpandedDesign& design, const LassoConfig& config) {
  Eigen::VectorXd lambda(design.cols());
  for (Eigen::Index l = 0; l < design.cols(); ++l)
    lambda(l) = group_lambda(design.groups[static_cast<std::size_t>(l)], config);
  return lambda;
}

void enrich_lasso_trace(TraceRow& row, const ExpandedDesign& design, const Eigen::VectorXd& theta,
                        const TraceTargets* targets) {
  if (!targets) return;
  GroupedCoefficients original;
  const bool need = targets->truth_original || (targets->test_design && targets->y_test);
  if (!need) return;
  original = rescale_coefficients_to_original(
      GroupedCoefficients::from_stacked(theta, design.feature_count), design.norms);
  if (targets->truth_original)
    row.coeff_mse = (original.stacked() - targets->truth_original->stacked()).squaredNorm() /
                    static_cast<double>(design.cols());
  if (targets->test_design && targets->y_test)
    row.test_mse = test_mse(*targets->test_design, original, *targets->y_test);
}

// Coordinate descent with an optional warm start; cross-validation walks the
// lambda path with it.
SolverResult lasso_cd_from(const ExpandedDesign& design, const Eigen::VectorXd& y,
                           const LassoConfig& config, const TraceTargets* targets,
                           Eigen::VectorXd theta) {
  check_lasso_inputs(design, y, config);
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = design.rows();
  const auto l = design.cols();
  const Eigen::VectorXd lambda = per_column_lambdas(design, config);

  if (theta.size() == 0) theta = Eigen::VectorXd::Zero(l);
  if (theta.size() != l) throw std::invalid_argument("lasso_cd: warm start has wrong length");
  Eigen::VectorXd r = y - design.data * theta;

  SolverResult result;
  result.trace.push_back({0, r.norm(), r.squaredNorm() / static_cast<double>(m), std::nullopt,
                          std::nullopt});
  enrich_lasso_trace(result.trace.back(), design, theta, targets);

  for (int sweeps = 0; sweeps < config.max_iters; ++sweeps) {
    double max_change = 0.0;
    for (Eigen::Index li = 0; li < l; ++li) {
      const auto col = design.data.col(li);
      const double z = theta(li) + col.dot(r);
      const double updated = soft_threshold(z, lambda(li));
      const double delta = updated - theta(li);
      if (delta != 0.0) {
        r -= delta * col;
        theta(li) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    result.trace.push_back({sweeps + 1, r.norm(), r.squaredNorm() / static_cast<double>(m),
                            std::nullopt, std::nullopt});
    enrich_lasso_trace(result.trace.back(), design, theta, targets);
    if (max_change < config.tol) {
      result.converged = true;
      break;
    }
  }

  result.iterations_used = static_cast<int>(result.trace.size()) - 1;
  result.theta_hat_normalized = theta;
  result.theta_hat_original = rescale_coefficients_to_original(
      GroupedCoefficients::from_stacked(theta, design.feature_count), design.norms);
  result.final_residual = y - design.data * theta;  // drift-free recompute
  result.final_sigma2_eff = result.final_residual.squaredNorm() / static_cast<double>(m);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// Rebuilds an original-scale design from selected rows of a normalized one.
ExpandedDesign subset_rows_original_scale(const ExpandedDesign& design,
                                          const std::vector<int>& rows) {
  ExpandedDesign sub;
  sub.data.resize(static_cast<Eigen::Index>(rows.size()), design.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    sub.data.row(static_cast<Eigen::Index>(i)) = design.data.row(rows[i]);
  if (design.normalized)
    sub.data = sub.data * design.norms.asDiagonal();
  sub.groups = design.groups;
  sub.norms = Eigen::VectorXd::Ones(design.cols());
  sub.normalized = false;
  sub.feature_count = design.feature_count;
  return sub;
}

}  // namespace

double soft_threshold(double x, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("soft_threshold: lambda must be >= 0");
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return 0.0;
}

SolverResult lasso_cd(const ExpandedDesign& design, const Eigen::VectorXd& y,
                      const LassoConfig& config, const TraceTargets* targets) {
  return lasso_cd_from(design, y, config, targets, Eigen::VectorXd());
}

double lasso_kkt_violation(const ExpandedDesign& design, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& theta_normalized, const LassoConfig& config) {
  const Eigen::VectorXd corr =
      design.data.transpose() * (y - design.data * theta_normalized);
  const Eigen::VectorXd lambda = per_column_lambdas(design, config);
  double worst = 0.0;
  for (Eigen::Index l = 0; l < design.cols(); ++l) {
    const double t = theta_normalized(l);
    const double v = t != 0.0 ? std::abs(corr(l) - lambda(l) * (t > 0.0 ? 1.0 : -1.0))
                              : std::max(std::abs(corr(l)) - lambda(l), 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

std::vector<double> default_lambda_grid(const ExpandedDesign& design, const Eigen::VectorXd& y,
                                        int points, double lo_factor, double hi_factor) {
  if (points < 1) throw std::invalid_argument("default_lambda_grid: points must be >= 1");
  const double lambda_max = (design.data.transpose() * y).cwiseAbs().maxCoeff();
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = hi_factor * lambda_max;
    return grid;
  }
  const double log_lo = std::log(lo_factor * lambda_max);
  const double log_hi = std::log(hi_factor * lambda_max);
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] =
        std::exp(log_lo + (log_hi - log_lo) * i / static_cast<double>(points - 1));
  return grid;
}

CvResult cross_validate_lambda(const ExpandedDesign& design, const Eigen::VectorXd& y,
                               const std::vector<double>& grid, int folds,
                               const LassoConfig& config, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cross_validate_lambda: folds must be >= 2");
  if (grid.empty()) throw std::invalid_argument("cross_validate_lambda: empty lambda grid");
  const auto m = design.rows();
  if (m < folds) throw std::invalid_argument("cross_validate_lambda: fewer rows than folds");

  // deterministic fold assignment: seeded permutation dealt round-robin
  Rng rng(seed);
  const std::vector<int> perm = shuffled_indices(static_cast<int>(m), rng);
  std::vector<std::vector<int>> fold_rows(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < perm.size(); ++i)
    fold_rows[i % static_cast<std::size_t>(folds)].push_back(perm[i]);

  // lambdas walked descending with warm starts; the path is cheap that way
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

  Eigen::MatrixXd val_mse(static_cast<Eigen::Index>(grid.size()), folds);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows;
    train_rows.reserve(static_cast<std::size_t>(m));
    for (int g = 0; g < folds; ++g)
      if (g != f)
        train_rows.insert(train_rows.end(), fold_rows[static_cast<std::size_t>(g)].begin(),
                          fold_rows[static_cast<std::size_t>(g)].end());
    std::sort(train_rows.begin(), train_rows.end());
    std::vector<int> val = fold_rows[static_cast<std::size_t>(f)];
    std::sort(val.begin(), val.end());

    const ExpandedDesign train_design = normalize_columns(subset_rows_original_scale(design, train_rows));
    const ExpandedDesign val_design = subset_rows_original_scale(design, val);
    Eigen::VectorXd y_train(static_cast<Eigen::Index>(train_rows.size()));
    for (std::size_t i = 0; i < train_rows.size(); ++i) y_train(static_cast<Eigen::Index>(i)) = y(train_rows[i]);
    Eigen::VectorXd y_val(static_cast<Eigen::Index>(val.size()));
    for (std::size_t i = 0; i < val.size(); ++i) y_val(static_cast<Eigen::Index>(i)) = y(val[i]);

    LassoConfig fold_config = config;
    fold_config.equalize = true;
    Eigen::VectorXd warm;
    for (std::size_t oi : order) {
      fold_config.lambdas[0] = grid[oi];
      const SolverResult fit = lasso_cd_from(train_design, y_train, fold_config, nullptr, warm);
      warm = fit.theta_hat_normalized;
      val_mse(static_cast<Eigen::Index>(oi), f) =
          test_mse(val_design, fit.theta_hat_original, y_val);
    }
  }

  CvResult out;
  out.curve.resize(grid.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto row = val_mse.row(static_cast<Eigen::Index>(i));
    const double mean = row.mean();
    const double var = (row.array() - mean).square().sum() / static_cast<double>(folds - 1);
    out.curve[i] = {grid[i], mean, std::sqrt(var)};
    if (mean < best) {
      best = mean;
      out.lambda = grid[i];
    }
  }
  return out;
}

void write_cv_curve_csv(const std::filesystem::path& file, const CvResult& cv) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  auto fmt = [](double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
  };
  out << "lambda,mean_val_mse,std_val_mse\n";
  for (const CvPoint& p : cv.curve)
    out << fmt(p.lambda) << ',' << fmt(p.mean_val_mse) << ',' << fmt(p.std_val_mse) << '\n';
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

SolverResult pseudoinverse_solve(const ExpandedDesign& design, const Eigen::VectorXd& y) {
  if (!design.data.allFinite())
    throw std::invalid_argument("pseudoinverse_solve: non-finite design");
  if (y.size() != design.rows())
    throw std::invalid_argument("pseudoinverse_solve: measurement length mismatch");
  const auto t0 = std::chrono::steady_clock::now();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(design.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
  const Eigen::VectorXd theta =
      svd.matrixV() * inv_sv.asDiagonal() * (svd.matrixU().transpose() * y);

  SolverResult result;
  result.theta_hat_normalized = theta;
  result.theta_hat_original = rescale_coefficients_to_original(
      GroupedCoefficients::from_stacked(theta, design.feature_count), design.norms);
  result.converged = true;
  result.iterations_used = 0;
  result.final_residual = y - design.data * theta;
  result.final_sigma2_eff =
      result.final_residual.squaredNorm() / static_cast<double>(design.rows());
  result.trace.push_back({0, result.final_residual.norm(), result.final_sigma2_eff, std::nullopt,
                          std::nullopt});
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace qamp
