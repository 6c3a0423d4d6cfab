#include "qamp/empirical_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qamp {

namespace {

double log_normal_pdf(double x, double var) {
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + x * x / var);
}

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void check_bounds(const EbConfig& c) {
  if (!(c.p_min > 0.0 && c.p_min <= c.p_max && c.p_max <= 1.0))
    throw std::invalid_argument("eb: p bounds must satisfy 0 < p_min <= p_max <= 1");
  if (!(c.tau_min > 0.0 && c.tau_min <= c.tau_max))
    throw std::invalid_argument("eb: tau bounds must satisfy 0 < tau_min <= tau_max");
  if (c.em_steps_per_amp_iter < 0)
    throw std::invalid_argument("eb: em_steps_per_amp_iter must be >= 0");
}

}  // namespace

double bg_marginal_loglik(const Eigen::VectorXd& q, double sigma2, const BgPrior& prior) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("bg_marginal_loglik: sigma2 must be > 0");
  const BgPrior pr = clamped(prior);
  const double log_zero_weight =
      pr.p >= 1.0 ? -std::numeric_limits<double>::infinity() : std::log(1.0 - pr.p);
  const double log_nonzero_weight = std::log(pr.p);
  double total = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    total += log_sum_exp(log_zero_weight + log_normal_pdf(q(i), sigma2),
                         log_nonzero_weight + log_normal_pdf(q(i), pr.tau + sigma2));
  }
  return total;
}

EmUpdateResult em_update_bg(const Eigen::VectorXd& q_group, double sigma2, BgPrior current,
                            const EbConfig& config) {
  if (q_group.size() == 0) throw std::invalid_argument("em_update_bg: empty group");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("em_update_bg: sigma2 must be > 0");
  check_bounds(config);

  EmUpdateResult out;
  out.prior = current;
  out.loglik.reserve(static_cast<std::size_t>(config.em_steps_per_amp_iter) + 1);
  out.loglik.push_back(bg_marginal_loglik(q_group, sigma2, out.prior));

  const auto count = static_cast<double>(q_group.size());
  for (int step = 0; step < config.em_steps_per_amp_iter; ++step) {
    const double wiener = out.prior.tau / (out.prior.tau + sigma2);
    const double posterior_var = out.prior.tau * sigma2 / (out.prior.tau + sigma2);
    double gamma_sum = 0.0;
    double weighted_second_moment = 0.0;
    for (Eigen::Index i = 0; i < q_group.size(); ++i) {
      const double gamma = bg_nonzero_posterior(q_group(i), sigma2, out.prior);
      const double mean_if_nonzero = wiener * q_group(i);
      gamma_sum += gamma;
      weighted_second_moment += gamma * (posterior_var + mean_if_nonzero * mean_if_nonzero);
    }
    out.prior.p = std::clamp(gamma_sum / count, config.p_min, config.p_max);
    if (gamma_sum > 0.0)
      out.prior.tau = std::clamp(weighted_second_moment / gamma_sum, config.tau_min, config.tau_max);
    out.loglik.push_back(bg_marginal_loglik(q_group, sigma2, out.prior));
  }
  return out;
}

SolverResult eb_amp_run(const ExpandedDesign& design, const Eigen::VectorXd& y,
                        const AmpConfig& amp_config, const EbConfig& eb_config,
                        const TraceTargets* targets, EbDiagnostics* diagnostics) {
  check_bounds(eb_config);
  const int n = design.feature_count;
  const Eigen::Index l = design.cols();
  if (column_count(n) != l)
    throw std::invalid_argument("eb_amp_run: design group metadata inconsistent");

  if (eb_config.em_steps_per_amp_iter == 0)
    return detail::amp_run_impl(design, y, eb_config.init, amp_config, targets, nullptr);

  detail::PriorRefresh refresh = [&](const Eigen::VectorXd& q, double sigma2,
                                     GroupPriorSet& priors) {
    // group segments follow the fixed design layout
    const auto linear_q = q.segment(1, n);
    const auto quadratic_q = q.segment(1 + n, n);
    const auto cross_q = q.segment(1 + 2 * n, l - 1 - 2 * n);

    auto update = [&](const Eigen::VectorXd& qg, BgPrior& prior) {
      EmUpdateResult res = em_update_bg(qg, sigma2, prior, eb_config);
      prior = res.prior;
      if (diagnostics) {
        for (std::size_t i = 1; i < res.loglik.size(); ++i)
          diagnostics->min_loglik_delta =
              std::min(diagnostics->min_loglik_delta, res.loglik[i] - res.loglik[i - 1]);
      }
    };
    update(linear_q, priors.linear);
    update(quadratic_q, priors.quadratic);
    update(cross_q, priors.cross);

    // single observation: moment estimate instead of EM
    priors.dc.tau =
        std::clamp(q(0) * q(0) - sigma2, eb_config.tau_min, eb_config.tau_max);

    if (diagnostics) diagnostics->priors_per_iteration.push_back(priors);
  };

  return detail::amp_run_impl(design, y, eb_config.init, amp_config, targets, &refresh);
}

}  // namespace qamp
