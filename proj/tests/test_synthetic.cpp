#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "qamp/rng.hpp"
#include "qamp/synthetic.hpp"

using namespace qamp;

namespace {

GroupPriorSet planted_priors() {
  GroupPriorSet p;
  p.dc = {10.0};
  p.linear = {0.2, 1.0};
  p.quadratic = {0.2, 0.5};
  p.cross = {0.03, 0.1};
  return p;
}

}  // namespace

TEST_CASE("gen_features determinism and moments") {
  SUBCASE("same seed, same matrix; different seed, different matrix") {
    const FeatureMatrix a = gen_features(30, 7, 91);
    const FeatureMatrix b = gen_features(30, 7, 91);
    const FeatureMatrix c = gen_features(30, 7, 92);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - c).cwiseAbs().maxCoeff() != 0.0);
  }

  SUBCASE("large-sample moments") {
    const FeatureMatrix x = gen_features(100000, 1, 93);
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    CHECK(std::abs(mean) <= 0.02);
    CHECK(std::abs(var - 1.0) <= 0.02);
  }
}

TEST_CASE("gen_bayes_coefficients") {
  SUBCASE("group energies match the model over 1000 draws") {
    const int n = 100;
    const int draws = 1000;
    double e_dc = 0, e_lin = 0, e_quad = 0, e_cross = 0;
    for (int d = 0; d < draws; ++d) {
      const GroupedCoefficients c =
          gen_bayes_coefficients(n, planted_priors(), 1000 + static_cast<std::uint64_t>(d));
      e_dc += c.dc * c.dc;
      e_lin += c.linear.squaredNorm();
      e_quad += c.quadratic.squaredNorm();
      e_cross += c.cross.squaredNorm();
    }
    CHECK(e_dc / draws == doctest::Approx(10.0).epsilon(0.10));
    CHECK(e_lin / draws == doctest::Approx(20.0).epsilon(0.10));
    CHECK(e_quad / draws == doctest::Approx(10.0).epsilon(0.10));
    CHECK(e_cross / draws == doctest::Approx(14.85).epsilon(0.10));
  }

  SUBCASE("nonzero fractions match the prior probabilities") {
    const int n = 100;
    const int draws = 1000;
    double frac_lin = 0, frac_quad = 0, frac_cross = 0;
    for (int d = 0; d < draws; ++d) {
      const GroupedCoefficients c =
          gen_bayes_coefficients(n, planted_priors(), 5000 + static_cast<std::uint64_t>(d));
      frac_lin += static_cast<double>((c.linear.array() != 0.0).count()) / n;
      frac_quad += static_cast<double>((c.quadratic.array() != 0.0).count()) / n;
      frac_cross +=
          static_cast<double>((c.cross.array() != 0.0).count()) / (n * (n - 1) / 2.0);
    }
    CHECK(std::abs(frac_lin / draws - 0.2) <= 0.02);
    CHECK(std::abs(frac_quad / draws - 0.2) <= 0.02);
    CHECK(std::abs(frac_cross / draws - 0.03) <= 0.02);
  }

  SUBCASE("p = 0 gives an all-zero group") {
    GroupPriorSet priors = planted_priors();
    priors.cross.p = 0.0;
    const GroupedCoefficients c = gen_bayes_coefficients(40, priors, 9);
    CHECK(c.cross.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("fixed seed reproduces the vector") {
    const GroupedCoefficients a = gen_bayes_coefficients(12, planted_priors(), 10);
    const GroupedCoefficients b = gen_bayes_coefficients(12, planted_priors(), 10);
    CHECK((a.stacked() - b.stacked()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("gen_bayes_dataset") {
  SUBCASE("noiseless limit matches the prediction oracle") {
    BayesModelSpec spec;
    spec.n = 5;
    spec.m = 50;
    spec.noise_var = 1e-300;
    spec.priors = planted_priors();
    spec.seed = 11;
    const Dataset d = gen_bayes_dataset(spec, 10);
    REQUIRE(d.truth.has_value());
    for (Eigen::Index r = 0; r < d.x_train.rows(); ++r) {
      const double direct = test::naive_quadratic_eval(d.x_train.row(r).transpose(), *d.truth);
      CHECK(std::abs(d.y_train(r) - direct) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }

  SUBCASE("splits are disjoint and cover m rows") {
    BayesModelSpec spec;
    spec.n = 4;
    spec.m = 40;
    spec.priors = planted_priors();
    spec.seed = 12;
    const Dataset d = gen_bayes_dataset(spec, 15);
    CHECK(d.x_train.rows() == 25);
    CHECK(d.x_test.rows() == 15);
    // train/test rows come from one draw of 40: they are its top and bottom
    const FeatureMatrix full = gen_features(40, 4, derive_seed(12, 0));
    CHECK((d.x_train - full.topRows(25)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((d.x_test - full.bottomRows(15)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("empirical noise variance is the configured one") {
    BayesModelSpec spec;
    spec.n = 100;
    spec.m = 6000;
    spec.noise_var = 0.004;
    spec.priors = planted_priors();
    spec.seed = 13;
    const Dataset d = gen_bayes_dataset(spec, 600);
    // full-size check: train design has the reference dimensions
    const ExpandedDesign train = expand_quadratic(d.x_train);
    CHECK(train.rows() == 5400);
    CHECK(train.cols() == 5151);
    const Eigen::VectorXd clean = predict(train, *d.truth, CoeffScale::Original);
    const double var = (d.y_train - clean).squaredNorm() / 5400.0;
    CHECK(var == doctest::Approx(0.004).epsilon(0.10));
  }

  SUBCASE("k_test must leave at least one training row") {
    BayesModelSpec spec;
    spec.n = 3;
    spec.m = 10;
    spec.priors = planted_priors();
    CHECK_THROWS_AS(gen_bayes_dataset(spec, 10), std::invalid_argument);
    CHECK_THROWS_AS(gen_bayes_dataset(spec, 0), std::invalid_argument);
  }
}

TEST_CASE("gen_sinusoid_dataset") {
  SUBCASE("all-zero rho collapses to a constant target") {
    SinusoidSpec spec = default_sinusoid_spec(6, 60, 14);
    spec.rho_prior.p = 0.0;  // every rho entry is the spike
    const Dataset d = gen_sinusoid_dataset(spec, 10);
    const double level = d.y_train.mean();
    CHECK((d.y_train.array() - level).abs().maxCoeff() <= 0.1);  // only the 1e-4 noise remains
    CHECK_FALSE(d.truth.has_value());
  }

  SUBCASE("the sinusoid sum is bounded by the total weight") {
    SinusoidSpec spec = default_sinusoid_spec(10, 300, 15);
    spec.noise_var = 1e-300;  // isolate the sinusoids
    const Dataset d = gen_sinusoid_dataset(spec, 50);
    CHECK(d.y_train.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
    CHECK(d.y_test.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
  }

  SUBCASE("fixed seed reproduces the dataset") {
    const SinusoidSpec spec = default_sinusoid_spec(8, 80, 16);
    const Dataset a = gen_sinusoid_dataset(spec, 20);
    const Dataset b = gen_sinusoid_dataset(spec, 20);
    CHECK((a.y_train - b.y_train).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.x_test - b.x_test).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("default rho prior keeps the sine argument at unit scale") {
    const SinusoidSpec spec = default_sinusoid_spec(30, 100, 17);
    CHECK(spec.rho_prior.tau == doctest::Approx(1.0 / (0.05 * 30)));
  }
}

TEST_CASE("test_mse") {
  BayesModelSpec spec;
  spec.n = 4;
  spec.m = 60;
  spec.noise_var = 1e-300;
  spec.priors = planted_priors();
  spec.seed = 18;
  const Dataset d = gen_bayes_dataset(spec, 20);
  const ExpandedDesign test_design = expand_quadratic(d.x_test);

  SUBCASE("truth on noiseless data scores zero") {
    CHECK(test_mse(test_design, *d.truth, d.y_test) <= 1e-20);
  }

  SUBCASE("the zero estimate scores the signal energy") {
    const GroupedCoefficients zero = GroupedCoefficients::zero(4);
    CHECK(test_mse(test_design, zero, d.y_test) ==
          doctest::Approx(d.y_test.squaredNorm() / 20.0));
  }

  SUBCASE("agrees with the elementwise loop") {
    GroupedCoefficients est = *d.truth;
    est.linear(2) += 0.25;  // perturb to get a nonzero error
    const double fast = test_mse(test_design, est, d.y_test);
    double slow = 0.0;
    for (Eigen::Index r = 0; r < d.x_test.rows(); ++r) {
      const double pred = test::naive_quadratic_eval(d.x_test.row(r).transpose(), est);
      slow += (d.y_test(r) - pred) * (d.y_test(r) - pred);
    }
    slow /= static_cast<double>(d.x_test.rows());
    CHECK(std::abs(fast - slow) <= 1e-12 * std::max(1.0, slow));
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(test_mse(test_design, *d.truth, d.y_train), std::invalid_argument);
  }
}

TEST_CASE("dataset directory round trip") {
  BayesModelSpec spec;
  spec.n = 3;
  spec.m = 25;
  spec.noise_var = 0.01;
  spec.priors = planted_priors();
  spec.seed = 19;
  const Dataset d = gen_bayes_dataset(spec, 5);

  const auto dir = std::filesystem::temp_directory_path() / "qamp_dataset_test";
  std::filesystem::remove_all(dir);
  save_dataset(dir, d, {{"kind", "planted"}, {"seed", 19}});
  const Dataset back = load_dataset(dir);
  CHECK((back.x_train - d.x_train).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.y_train - d.y_train).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.x_test - d.x_test).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.y_test - d.y_test).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.truth.has_value());
  CHECK((back.truth->stacked() - d.truth->stacked()).cwiseAbs().maxCoeff() == 0.0);

  // sinusoid datasets carry no truth file
  const Dataset sine = gen_sinusoid_dataset(default_sinusoid_spec(4, 30, 20), 5);
  const auto dir2 = std::filesystem::temp_directory_path() / "qamp_dataset_test2";
  std::filesystem::remove_all(dir2);
  save_dataset(dir2, sine, {{"kind", "sinusoid"}});
  CHECK_FALSE(std::filesystem::exists(dir2 / "truth.json"));
  CHECK_FALSE(load_dataset(dir2).truth.has_value());
}
