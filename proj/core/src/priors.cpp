#include "qamp/priors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qamp {

namespace {

void check_sigma2(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("denoiser: channel variance must be > 0");
}

// log of the prior-odds factor in gamma(q):
//   log((1-p)/p) + 0.5*log((tau+s)/s) - q^2 tau / (2 s (tau+s)).
// gamma(q) = 1 / (1 + exp(g)).
double log_odds_against_nonzero(double q, double s, const BgPrior& pr) {
  if (pr.p >= 1.0) return -std::numeric_limits<double>::infinity();
  const double ts = pr.tau + s;
  return std::log((1.0 - pr.p) / pr.p) + 0.5 * std::log(ts / s) -
         q * q * pr.tau / (2.0 * s * ts);
}

}  // namespace

BgPrior clamped(BgPrior prior) {
  prior.p = std::clamp(prior.p, kMinNonzeroProb, 1.0);
  prior.tau = std::max(prior.tau, kMinPriorVariance);
  return prior;
}

GaussianPrior clamped(GaussianPrior prior) {
  prior.tau = std::max(prior.tau, kMinPriorVariance);
  return prior;
}

double bg_nonzero_posterior(double q, double sigma2, const BgPrior& prior) {
  check_sigma2(sigma2);
  const BgPrior pr = clamped(prior);
  const double g = log_odds_against_nonzero(q, sigma2, pr);
  if (g == -std::numeric_limits<double>::infinity()) return 1.0;
  // 1/(1+e^g), evaluated from whichever side avoids overflow.
  if (g >= 0.0) {
    const double e = std::exp(-g);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(g));
}

double bg_denoise(double q, double sigma2, const BgPrior& prior) {
  check_sigma2(sigma2);
  const BgPrior pr = clamped(prior);
  const double wiener = pr.tau / (pr.tau + sigma2);
  return bg_nonzero_posterior(q, sigma2, pr) * wiener * q;
}

double bg_denoise_derivative(double q, double sigma2, const BgPrior& prior) {
  check_sigma2(sigma2);
  const BgPrior pr = clamped(prior);
  const double wiener = pr.tau / (pr.tau + sigma2);
  const double gamma = bg_nonzero_posterior(q, sigma2, pr);
  // d gamma/dq = a q gamma (1-gamma) with a = tau / (s (tau+s)).
  const double a = pr.tau / (sigma2 * (pr.tau + sigma2));
  return wiener * gamma * (1.0 + a * q * q * (1.0 - gamma));
}

double gaussian_denoise(double q, double sigma2, const GaussianPrior& prior) {
  check_sigma2(sigma2);
  const GaussianPrior pr = clamped(prior);
  return q * pr.tau / (pr.tau + sigma2);
}

double gaussian_denoise_derivative(double sigma2, const GaussianPrior& prior) {
  check_sigma2(sigma2);
  const GaussianPrior pr = clamped(prior);
  return pr.tau / (pr.tau + sigma2);
}

double denoise_entry(const ColumnGroup& g, double q, double sigma2, const GroupPriorSet& priors) {
  switch (g.kind) {
    case ColumnKind::Dc:
      return gaussian_denoise(q, sigma2, priors.dc);
    case ColumnKind::Linear:
      return bg_denoise(q, sigma2, priors.linear);
    case ColumnKind::Quadratic:
      return bg_denoise(q, sigma2, priors.quadratic);
    case ColumnKind::Cross:
      return bg_denoise(q, sigma2, priors.cross);
  }
  throw std::logic_error("denoise_entry: bad column kind");
}

double denoise_entry_derivative(const ColumnGroup& g, double q, double sigma2,
                                const GroupPriorSet& priors) {
  switch (g.kind) {
    case ColumnKind::Dc:
      return gaussian_denoise_derivative(sigma2, priors.dc);
    case ColumnKind::Linear:
      return bg_denoise_derivative(q, sigma2, priors.linear);
    case ColumnKind::Quadratic:
      return bg_denoise_derivative(q, sigma2, priors.quadratic);
    case ColumnKind::Cross:
      return bg_denoise_derivative(q, sigma2, priors.cross);
  }
  throw std::logic_error("denoise_entry_derivative: bad column kind");
}

GroupedDenoiseResult grouped_denoise(const Eigen::VectorXd& q, double sigma2,
                                     const GroupPriorSet& priors,
                                     const std::vector<ColumnGroup>& groups) {
  if (static_cast<std::size_t>(q.size()) != groups.size())
    throw std::invalid_argument("grouped_denoise: group map does not match input length");
  GroupedDenoiseResult out;
  out.theta.resize(q.size());
  double deriv_sum = 0.0;  // fixed in-order reduction, deterministic
  for (Eigen::Index l = 0; l < q.size(); ++l) {
    const ColumnGroup& g = groups[static_cast<std::size_t>(l)];
    out.theta(l) = denoise_entry(g, q(l), sigma2, priors);
    deriv_sum += denoise_entry_derivative(g, q(l), sigma2, priors);
  }
  out.mean_derivative = deriv_sum / static_cast<double>(q.size());
  return out;
}

GroupPriorSet priors_for_normalized_design(const GroupPriorSet& priors,
                                           const ExpandedDesign& design) {
  if (!design.normalized)
    throw std::invalid_argument("priors_for_normalized_design: design must be normalized");
  double sum_sq[4] = {0.0, 0.0, 0.0, 0.0};
  int count[4] = {0, 0, 0, 0};
  for (Eigen::Index l = 0; l < design.cols(); ++l) {
    const int k = static_cast<int>(design.groups[static_cast<std::size_t>(l)].kind);
    sum_sq[k] += design.norms(l) * design.norms(l);
    ++count[k];
  }
  auto mean_sq = [&](ColumnKind kind) {
    const int k = static_cast<int>(kind);
    return count[k] > 0 ? sum_sq[k] / count[k] : 1.0;
  };
  GroupPriorSet scaled = priors;
  scaled.dc.tau *= mean_sq(ColumnKind::Dc);
  scaled.linear.tau *= mean_sq(ColumnKind::Linear);
  scaled.quadratic.tau *= mean_sq(ColumnKind::Quadratic);
  scaled.cross.tau *= mean_sq(ColumnKind::Cross);
  return scaled;
}

nlohmann::json to_json(const GroupPriorSet& priors) {
  return {
      {"dc", {{"tau", priors.dc.tau}}},
      {"linear", {{"p", priors.linear.p}, {"tau", priors.linear.tau}}},
      {"quadratic", {{"p", priors.quadratic.p}, {"tau", priors.quadratic.tau}}},
      {"cross", {{"p", priors.cross.p}, {"tau", priors.cross.tau}}},
  };
}

GroupPriorSet prior_set_from_json(const nlohmann::json& j) {
  GroupPriorSet s;
  s.dc.tau = j.at("dc").at("tau").get<double>();
  auto bg = [&](const char* key) {
    return BgPrior{j.at(key).at("p").get<double>(), j.at(key).at("tau").get<double>()};
  };
  s.linear = bg("linear");
  s.quadratic = bg("quadratic");
  s.cross = bg("cross");
  return s;
}

}  // namespace qamp
