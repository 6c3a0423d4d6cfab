#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "qamp/expansion.hpp"
#include "qamp/priors.hpp"

namespace qamp {

// Planted quadratic model: theta drawn from `priors`, y = X_Q theta + z.
// `m` counts ALL samples; generators split them into m - k_test training
// rows and k_test test rows.
struct BayesModelSpec {
  int n = 100;
  int m = 6000;
  double noise_var = 0.004;
  GroupPriorSet priors;
  std::uint64_t seed = 1;
};

// y = sum_i w_i sin(X rho_i + phi_i) + z. Each rho_i is a sparse BG vector;
// each phi_i is a single phase shared by all samples of a realization, so
// the target is a fixed function of x. (A fresh phase per sample would make
// y independent of x given the phases, i.e. nothing to estimate.)
struct SinusoidSpec {
  std::array<double, 3> weights{0.1, 0.3, 0.6};
  BgPrior rho_prior{0.05, 1.0};
  int n = 30;
  int m = 500;
  double noise_var = 1e-4;
  std::uint64_t seed = 1;
};

// rho_prior tuned so var(x^T rho) is about 1 per sample: tau = 1 / (p n).
SinusoidSpec default_sinusoid_spec(int n, int m, std::uint64_t seed);

struct Dataset {
  FeatureMatrix x_train;
  Eigen::VectorXd y_train;
  FeatureMatrix x_test;
  Eigen::VectorXd y_test;
  std::optional<GroupedCoefficients> truth;  // original scale; planted model only
};

// i.i.d. standard normal entries, filled row by row (sample by sample).
FeatureMatrix gen_features(int m, int n, std::uint64_t seed);

// One draw per coefficient in design-column order (dc, linear, quadratic,
// cross). BG entries draw the Bernoulli uniform first, then the Gaussian
// only when nonzero.
GroupedCoefficients gen_bayes_coefficients(int n, const GroupPriorSet& priors, std::uint64_t seed);

// Seed streams: features = derive_seed(seed, 0), coefficients = 1, noise = 2.
// The first m - k_test rows become the training split.
Dataset gen_bayes_dataset(const BayesModelSpec& spec, int k_test);

// Seed streams: features = 0, rho vectors = 1, phases = 2, noise = 3.
Dataset gen_sinusoid_dataset(const SinusoidSpec& spec, int k_test);

// ||y_test - X_test theta_hat||^2 / K over the held-out rows. The design
// must be unnormalized (original scale), matching theta_hat.
double test_mse(const ExpandedDesign& x_test_expanded, const GroupedCoefficients& theta_hat,
                const Eigen::VectorXd& y_test);

// Dataset directory layout: x_train.csv, y_train.csv, x_test.csv,
// y_test.csv, spec.json, and truth.json when the truth is known.
void save_dataset(const std::filesystem::path& dir, const Dataset& data,
                  const nlohmann::json& spec_json);
Dataset load_dataset(const std::filesystem::path& dir);

nlohmann::json coefficients_to_json(const GroupedCoefficients& c);
GroupedCoefficients coefficients_from_json(const nlohmann::json& j);

}  // namespace qamp
