#include "qamp/amp.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>

#include "qamp/rng.hpp"
#include "qamp/synthetic.hpp"

namespace qamp {

namespace {

void check_inputs(const ExpandedDesign& design, const Eigen::VectorXd& y) {
  if (!design.normalized)
    throw std::invalid_argument("amp: design must be column-normalized");
  if (y.size() != design.rows())
    throw std::invalid_argument("amp: measurement length does not match design rows");
  if (!y.allFinite()) throw std::invalid_argument("amp: non-finite measurements");
}

void check_config(const AmpConfig& c) {
  if (!(c.damping > 0.0 && c.damping <= 1.0))
    throw std::invalid_argument("amp: damping must be in (0, 1]");
  if (!(c.tol > 0.0)) throw std::invalid_argument("amp: tol must be > 0");
  if (c.max_iters < 1) throw std::invalid_argument("amp: max_iters must be >= 1");
}

void append_trace(AmpState& state) {
  state.trace.push_back({state.iteration, state.residual.norm(), state.sigma2_eff,
                         std::nullopt, std::nullopt});
}

// Fills the optional columns of the newest trace row.
void enrich_trace(AmpState& state, const ExpandedDesign& design, const TraceTargets* targets) {
  if (!targets) return;
  TraceRow& row = state.trace.back();
  GroupedCoefficients original;
  const bool need_original = targets->truth_original || (targets->test_design && targets->y_test);
  if (need_original) {
    original = rescale_coefficients_to_original(
        GroupedCoefficients::from_stacked(state.theta, design.feature_count), design.norms);
  }
  if (targets->truth_original) {
    row.coeff_mse = (original.stacked() - targets->truth_original->stacked()).squaredNorm() /
                    static_cast<double>(design.cols());
  }
  if (targets->test_design && targets->y_test) {
    row.test_mse = test_mse(*targets->test_design, original, *targets->y_test);
  }
}

}  // namespace

double estimate_effective_noise(const Eigen::VectorXd& residual, Eigen::Index m) {
  if (m < 1) throw std::invalid_argument("estimate_effective_noise: m must be >= 1");
  return std::max(residual.squaredNorm() / static_cast<double>(m), 1e-12);
}

AmpState amp_init(const ExpandedDesign& design, const Eigen::VectorXd& y) {
  check_inputs(design, y);
  AmpState s;
  s.theta = Eigen::VectorXd::Zero(design.cols());
  s.residual = y;
  s.sigma2_eff = estimate_effective_noise(s.residual, design.rows());
  s.iteration = 0;
  append_trace(s);
  return s;
}

namespace detail {

void amp_step_impl(AmpState& state, const ExpandedDesign& design, const Eigen::VectorXd& y,
                   GroupPriorSet& priors, const AmpConfig& config, const PriorRefresh* refresh) {
  check_inputs(design, y);
  check_config(config);
  const auto m = design.rows();
  const auto l = design.cols();
  const double width_ratio = static_cast<double>(l) / static_cast<double>(m);

  const Eigen::VectorXd q = design.data.transpose() * state.residual + state.theta;
  if (refresh && *refresh) (*refresh)(q, state.sigma2_eff, priors);

  GroupedDenoiseResult den = grouped_denoise(q, state.sigma2_eff, priors, design.groups);

  Eigen::VectorXd theta_next;
  if (config.damping == 1.0)
    theta_next = std::move(den.theta);
  else
    theta_next = config.damping * den.theta + (1.0 - config.damping) * state.theta;

  const double onsager = width_ratio * den.mean_derivative;
  Eigen::VectorXd residual_next = y - design.data * theta_next + onsager * state.residual;
  if (config.damping != 1.0)
    residual_next = config.damping * residual_next + (1.0 - config.damping) * state.residual;

  if (!theta_next.allFinite() || !residual_next.allFinite())
    throw AmpDivergence(state.iteration + 1);  // state left at the last finite iterate

  ++state.iteration;
  state.theta = std::move(theta_next);
  state.residual = std::move(residual_next);
  state.sigma2_eff = estimate_effective_noise(state.residual, m);
  append_trace(state);
}

void amp_sweep_step_impl(AmpState& state, const ExpandedDesign& design, const Eigen::VectorXd& y,
                         GroupPriorSet& priors, const AmpConfig& config,
                         const PriorRefresh* refresh) {
  check_inputs(design, y);
  check_config(config);
  const auto m = design.rows();
  const auto l = design.cols();
  const double width_ratio = static_cast<double>(l) / static_cast<double>(m);

  if (refresh && *refresh) {
    const Eigen::VectorXd q_full = design.data.transpose() * state.residual + state.theta;
    (*refresh)(q_full, state.sigma2_eff, priors);
  }

  const Eigen::VectorXd theta_start = state.theta;
  const Eigen::VectorXd residual_start = state.residual;

  Rng perm_rng(derive_seed(config.seed, static_cast<std::uint64_t>(state.iteration)));
  const std::vector<int> order = shuffled_indices(static_cast<int>(l), perm_rng);

  Eigen::VectorXd theta = state.theta;
  Eigen::VectorXd r = state.residual;  // carries the previous Onsager term throughout the sweep
  double deriv_sum = 0.0;
  for (const int li : order) {
    const auto col = design.data.col(li);
    const double qi = col.dot(r) + theta(li);
    const ColumnGroup& g = design.groups[static_cast<std::size_t>(li)];
    const double updated = denoise_entry(g, qi, state.sigma2_eff, priors);
    deriv_sum += denoise_entry_derivative(g, qi, state.sigma2_eff, priors);
    const double delta = updated - theta(li);
    if (delta != 0.0) r -= delta * col;
    theta(li) = updated;
  }
  const double mean_deriv = deriv_sum / static_cast<double>(l);

  Eigen::VectorXd theta_next;
  if (config.damping == 1.0)
    theta_next = std::move(theta);
  else
    theta_next = config.damping * theta + (1.0 - config.damping) * theta_start;

  const double onsager = width_ratio * mean_deriv;
  Eigen::VectorXd residual_next = y - design.data * theta_next + onsager * residual_start;
  if (config.damping != 1.0)
    residual_next = config.damping * residual_next + (1.0 - config.damping) * residual_start;

  if (!theta_next.allFinite() || !residual_next.allFinite())
    throw AmpDivergence(state.iteration + 1);

  ++state.iteration;
  state.theta = std::move(theta_next);
  state.residual = std::move(residual_next);
  state.sigma2_eff = estimate_effective_noise(state.residual, m);
  append_trace(state);
}

SolverResult amp_run_impl(const ExpandedDesign& design, const Eigen::VectorXd& y,
                          GroupPriorSet priors, const AmpConfig& config,
                          const TraceTargets* targets, const PriorRefresh* refresh) {
  check_inputs(design, y);
  check_config(config);
  const auto t0 = std::chrono::steady_clock::now();

  AmpState state = amp_init(design, y);
  enrich_trace(state, design, targets);

  SolverResult result;
  for (int t = 0; t < config.max_iters; ++t) {
    const Eigen::VectorXd theta_prev = state.theta;
    try {
      if (config.variant == AmpVariant::Sweep)
        amp_sweep_step_impl(state, design, y, priors, config, refresh);
      else
        amp_step_impl(state, design, y, priors, config, refresh);
    } catch (const AmpDivergence& d) {
      // the step throws before committing, so state still holds the last
      // finite iterate
      result.diverged = true;
      result.diverged_at = d.iteration;
      break;
    }
    enrich_trace(state, design, targets);
    const double rel_change = (state.theta - theta_prev).norm() / std::max(theta_prev.norm(), 1e-12);
    if (rel_change < config.tol) {
      result.converged = true;
      break;
    }
  }

  result.iterations_used = static_cast<int>(state.trace.size()) - 1;
  result.theta_hat_normalized = state.theta;
  result.theta_hat_original = rescale_coefficients_to_original(
      GroupedCoefficients::from_stacked(result.theta_hat_normalized, design.feature_count),
      design.norms);
  result.trace = std::move(state.trace);
  result.final_residual = state.residual;
  result.final_sigma2_eff = state.sigma2_eff;
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace detail

void amp_step(AmpState& state, const ExpandedDesign& design, const Eigen::VectorXd& y,
              const GroupPriorSet& priors, const AmpConfig& config) {
  GroupPriorSet p = priors;
  detail::amp_step_impl(state, design, y, p, config, nullptr);
}

void amp_sweep_step(AmpState& state, const ExpandedDesign& design, const Eigen::VectorXd& y,
                    const GroupPriorSet& priors, const AmpConfig& config) {
  GroupPriorSet p = priors;
  detail::amp_sweep_step_impl(state, design, y, p, config, nullptr);
}

SolverResult amp_run(const ExpandedDesign& design, const Eigen::VectorXd& y,
                     const GroupPriorSet& priors, const AmpConfig& config,
                     const TraceTargets* targets) {
  return detail::amp_run_impl(design, y, priors, config, targets, nullptr);
}

void write_trace_csv(const std::filesystem::path& file, const std::vector<TraceRow>& trace) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << "iteration,residual_norm,sigma2_eff,coeff_mse,test_mse\n";
  auto fmt = [](double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
  };
  for (const TraceRow& row : trace) {
    out << row.iteration << ',' << fmt(row.residual_norm) << ',' << fmt(row.sigma2_eff) << ',';
    if (row.coeff_mse) out << fmt(*row.coeff_mse);
    out << ',';
    if (row.test_mse) out << fmt(*row.test_mse);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace qamp
