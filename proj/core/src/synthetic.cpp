#include "qamp/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "qamp/matrix_io.hpp"
#include "qamp/rng.hpp"

namespace qamp {

namespace {

double bg_draw(const BgPrior& prior, Rng& rng) {
  const double u = rng.uniform();
  if (u < prior.p) return rng.normal(0.0, std::sqrt(prior.tau));
  return 0.0;
}

Eigen::VectorXd noise_vector(Eigen::Index m, double var, Rng& rng) {
  Eigen::VectorXd z(m);
  const double sd = std::sqrt(var);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = rng.normal(0.0, sd);
  return z;
}

void check_split(int m, int k_test) {
  if (k_test < 1 || k_test >= m)
    throw std::invalid_argument("dataset generation: need 1 <= k_test < m");
}

}  // namespace

SinusoidSpec default_sinusoid_spec(int n, int m, std::uint64_t seed) {
  SinusoidSpec spec;
  spec.n = n;
  spec.m = m;
  spec.seed = seed;
  spec.rho_prior.p = 0.05;
  spec.rho_prior.tau = 1.0 / (spec.rho_prior.p * n);
  return spec;
}

FeatureMatrix gen_features(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_features: m and n must be >= 1");
  Rng rng(seed);
  FeatureMatrix x(m, n);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) x(r, c) = rng.normal();
  return x;
}

GroupedCoefficients gen_bayes_coefficients(int n, const GroupPriorSet& priors,
                                           std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_bayes_coefficients: n must be >= 1");
  Rng rng(seed);
  GroupedCoefficients c = GroupedCoefficients::zero(n);
  c.dc = rng.normal(0.0, std::sqrt(priors.dc.tau));
  for (int i = 0; i < n; ++i) c.linear(i) = bg_draw(priors.linear, rng);
  for (int i = 0; i < n; ++i) c.quadratic(i) = bg_draw(priors.quadratic, rng);
  for (Eigen::Index i = 0; i < c.cross.size(); ++i) c.cross(i) = bg_draw(priors.cross, rng);
  return c;
}

Dataset gen_bayes_dataset(const BayesModelSpec& spec, int k_test) {
  check_split(spec.m, k_test);
  if (!(spec.noise_var > 0.0))
    throw std::invalid_argument("gen_bayes_dataset: noise variance must be > 0");

  const FeatureMatrix x = gen_features(spec.m, spec.n, derive_seed(spec.seed, 0));
  const GroupedCoefficients truth =
      gen_bayes_coefficients(spec.n, spec.priors, derive_seed(spec.seed, 1));
  Rng noise_rng(derive_seed(spec.seed, 2));

  const int m_train = spec.m - k_test;
  Dataset d;
  d.x_train = x.topRows(m_train);
  d.x_test = x.bottomRows(k_test);
  d.truth = truth;

  const ExpandedDesign train_design = expand_quadratic(d.x_train);
  const ExpandedDesign test_design = expand_quadratic(d.x_test);
  d.y_train =
      predict(train_design, truth, CoeffScale::Original) + noise_vector(m_train, spec.noise_var, noise_rng);
  d.y_test =
      predict(test_design, truth, CoeffScale::Original) + noise_vector(k_test, spec.noise_var, noise_rng);
  return d;
}

Dataset gen_sinusoid_dataset(const SinusoidSpec& spec, int k_test) {
  check_split(spec.m, k_test);
  if (!(spec.noise_var > 0.0))
    throw std::invalid_argument("gen_sinusoid_dataset: noise variance must be > 0");

  const FeatureMatrix x = gen_features(spec.m, spec.n, derive_seed(spec.seed, 0));

  Rng rho_rng(derive_seed(spec.seed, 1));
  std::array<Eigen::VectorXd, 3> rho;
  for (auto& r : rho) {
    r.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) r(i) = bg_draw(spec.rho_prior, rho_rng);
  }

  Rng phase_rng(derive_seed(spec.seed, 2));
  std::array<double, 3> phase{};
  for (auto& ph : phase) ph = phase_rng.uniform(0.0, 2.0 * std::numbers::pi);

  Rng noise_rng(derive_seed(spec.seed, 3));
  Eigen::VectorXd y = noise_vector(spec.m, spec.noise_var, noise_rng);
  for (int i = 0; i < 3; ++i)
    y += spec.weights[static_cast<std::size_t>(i)] *
         ((x * rho[static_cast<std::size_t>(i)]).array() + phase[static_cast<std::size_t>(i)])
             .sin()
             .matrix();

  const int m_train = spec.m - k_test;
  Dataset d;
  d.x_train = x.topRows(m_train);
  d.y_train = y.head(m_train);
  d.x_test = x.bottomRows(k_test);
  d.y_test = y.tail(k_test);
  d.truth = std::nullopt;  // target lies outside the quadratic class
  return d;
}

double test_mse(const ExpandedDesign& x_test_expanded, const GroupedCoefficients& theta_hat,
                const Eigen::VectorXd& y_test) {
  if (y_test.size() != x_test_expanded.rows())
    throw std::invalid_argument("test_mse: y length does not match design rows");
  const Eigen::VectorXd pred = predict(x_test_expanded, theta_hat, CoeffScale::Original);
  return (y_test - pred).squaredNorm() / static_cast<double>(y_test.size());
}

nlohmann::json coefficients_to_json(const GroupedCoefficients& c) {
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  return {{"dc", c.dc},
          {"linear", vec(c.linear)},
          {"quadratic", vec(c.quadratic)},
          {"cross", vec(c.cross)}};
}

GroupedCoefficients coefficients_from_json(const nlohmann::json& j) {
  GroupedCoefficients c;
  c.dc = j.at("dc").get<double>();
  auto vec = [&](const char* key) {
    const auto v = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
  };
  c.linear = vec("linear");
  c.quadratic = vec("quadratic");
  c.cross = vec("cross");
  return c;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& data,
                  const nlohmann::json& spec_json) {
  std::filesystem::create_directories(dir);
  write_csv_matrix(dir / "x_train.csv", data.x_train);
  write_csv_vector(dir / "y_train.csv", data.y_train);
  write_csv_matrix(dir / "x_test.csv", data.x_test);
  write_csv_vector(dir / "y_test.csv", data.y_test);
  std::ofstream spec(dir / "spec.json");
  spec << spec_json.dump(2) << '\n';
  if (data.truth) {
    std::ofstream truth(dir / "truth.json");
    truth << coefficients_to_json(*data.truth).dump(2) << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset d;
  d.x_train = read_csv_matrix(dir / "x_train.csv");
  d.y_train = read_csv_vector(dir / "y_train.csv");
  d.x_test = read_csv_matrix(dir / "x_test.csv");
  d.y_test = read_csv_vector(dir / "y_test.csv");
  const auto truth_file = dir / "truth.json";
  if (std::filesystem::exists(truth_file)) {
    std::ifstream in(truth_file);
    nlohmann::json j;
    in >> j;
    d.truth = coefficients_from_json(j);
  }
  return d;
}

}  // namespace qamp
