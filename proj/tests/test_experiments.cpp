#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qamp/experiments.hpp"

using namespace qamp;

namespace {

std::filesystem::path fresh_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentSpec small_bayes_spec(const std::filesystem::path& dir) {
  ExperimentSpec spec = default_experiment_spec("bayes");
  spec.trials = 2;
  spec.n = 6;  // L = 28
  spec.m_train = 60;
  spec.k_test = 15;
  spec.seed = 7;
  spec.out_dir = dir.string();
  spec.amp.max_iters = 120;
  spec.lasso.grid_points = 8;
  return spec;
}

}  // namespace

TEST_CASE("experiment spec json") {
  SUBCASE("defaults resolve and round-trip") {
    const ExperimentSpec spec = default_experiment_spec("bayes");
    const nlohmann::json j = to_json(spec);
    const ExperimentSpec back = experiment_spec_from_json(j);
    CHECK(back.kind == "bayes");
    CHECK(back.m_train == spec.m_train);
    CHECK(back.priors.cross.p == spec.priors.cross.p);
    CHECK(to_json(back) == j);
  }

  SUBCASE("partial documents inherit kind defaults") {
    const ExperimentSpec spec =
        experiment_spec_from_json({{"kind", "eb"}, {"seed", 99}, {"realizations", 3}});
    CHECK(spec.seed == 99);
    CHECK(spec.realizations == 3);
    CHECK(spec.k_test == 200);  // eb default
    CHECK(spec.solvers.size() == 3);
    CHECK(spec.rates == std::vector<double>{0.14, 0.28, 0.56});
    CHECK(default_experiment_spec("eb").realizations == 20);
  }

  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(experiment_spec_from_json({{"kind", "bayes"}, {"m_trian", 10}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(experiment_spec_from_json({{"seed", 1}}), std::invalid_argument);
    CHECK_THROWS_AS(experiment_spec_from_json({{"kind", "nope"}}), std::invalid_argument);
  }

  SUBCASE("validation rejects empty solver lists before any computation") {
    ExperimentSpec spec = default_experiment_spec("bayes");
    spec.solvers.clear();
    CHECK_THROWS_AS(validate(spec), std::invalid_argument);
    CHECK_THROWS_AS(run_bayes_experiment(spec), std::invalid_argument);
  }

  SUBCASE("the default spectrum sweep has the fifteen reference rows") {
    CHECK(default_experiment_spec("spectrum").spectrum_dims.size() == 15);
  }
}

TEST_CASE("bayes experiment reports") {
  const auto dir = fresh_dir("qamp_exp_bayes");
  ExperimentSpec spec = small_bayes_spec(dir);
  const nlohmann::json summary = run_bayes_experiment(spec);

  SUBCASE("summary carries per-solver aggregates and the resolved spec") {
    CHECK(summary.at("spec").at("m_train") == 60);
    CHECK(summary.at("trials").size() == 2);
    const auto& agg = summary.at("aggregate");
    CHECK(agg.contains("amp"));
    CHECK(agg.contains("lasso"));
    CHECK(agg.at("amp").contains("median_coeff_mse"));
    CHECK(agg.at("amp").contains("median_test_mse"));
  }

  SUBCASE("trace files exist for every trial and solver") {
    for (int t = 0; t < 2; ++t) {
      CHECK(std::filesystem::exists(dir / ("trace_trial" + std::to_string(t) + "_amp.csv")));
      CHECK(std::filesystem::exists(dir / ("trace_trial" + std::to_string(t) + "_lasso.csv")));
      CHECK(std::filesystem::exists(dir / ("cv_trial" + std::to_string(t) + ".csv")));
    }
    CHECK(std::filesystem::exists(dir / "summary.json"));
  }

  SUBCASE("rerunning with the same seed reproduces every report byte for byte") {
    const std::string first_summary = slurp(dir / "summary.json");
    const std::string first_trace = slurp(dir / "trace_trial0_amp.csv");
    const auto dir2 = fresh_dir("qamp_exp_bayes_rerun");
    ExperimentSpec again = small_bayes_spec(dir);
    again.out_dir = dir2.string();
    run_bayes_experiment(again);
    // out_dir is part of the resolved spec, so compare everything else
    nlohmann::json a = nlohmann::json::parse(first_summary);
    nlohmann::json b = nlohmann::json::parse(slurp(dir2 / "summary.json"));
    a["spec"].erase("out_dir");
    b["spec"].erase("out_dir");
    CHECK(a == b);
    CHECK(first_trace == slurp(dir2 / "trace_trial0_amp.csv"));
  }
}

TEST_CASE("eb experiment reports") {
  const auto dir = fresh_dir("qamp_exp_eb");
  ExperimentSpec spec = default_experiment_spec("eb");
  spec.n = 6;  // L = 28
  spec.rates = {0.8, 1.6};
  spec.realizations = 3;
  spec.k_test = 30;
  spec.seed = 11;
  spec.out_dir = dir.string();
  spec.amp.max_iters = 80;
  spec.lasso.grid_points = 6;
  spec.priors_log = true;
  const nlohmann::json summary = run_eb_experiment(spec);

  SUBCASE("table has one row per rate with all solver columns") {
    std::ifstream in(dir / "table.csv");
    std::string header, row1, row2, extra;
    REQUIRE(std::getline(in, header));
    CHECK(header == "rate,m_train,eb_amp,lasso,pseudoinverse");
    REQUIRE(std::getline(in, row1));
    REQUIRE(std::getline(in, row2));
    CHECK(row1.substr(0, 4) == "0.8,");
    CHECK(row2.substr(0, 4) == "1.6,");
    CHECK_FALSE(std::getline(in, extra));
  }

  SUBCASE("each cell is the median over exactly the configured realizations") {
    for (const auto& rate_row : summary.at("rates")) {
      for (const auto& [name, cell] : rate_row.at("solvers").items()) {
        CHECK(cell.at("test_mse").size() == 3);
        std::vector<double> v = cell.at("test_mse").get<std::vector<double>>();
        std::sort(v.begin(), v.end());
        CHECK(cell.at("median_test_mse").get<double>() == v[1]);
      }
    }
  }

  SUBCASE("per-iteration priors are logged when requested") {
    CHECK(std::filesystem::exists(dir / "priors_rate0_real0.jsonl"));
    std::ifstream in(dir / "priors_rate0_real0.jsonl");
    std::string line;
    REQUIRE(std::getline(in, line));
    const nlohmann::json j = nlohmann::json::parse(line);
    CHECK(j.contains("linear"));
    CHECK(j.at("linear").contains("p"));
  }

  SUBCASE("em monotonicity diagnostic is reported") {
    CHECK(summary.at("min_em_loglik_delta").get<double>() >= -1e-9);
  }
}

TEST_CASE("spectrum experiment reports") {
  const auto dir = fresh_dir("qamp_exp_spectrum");
  ExperimentSpec spec = default_experiment_spec("spectrum");
  spec.spectrum_dims = {{150, 5}, {200, 6}};
  spec.spectrum_trials = 2;
  spec.seed = 13;
  spec.out_dir = dir.string();
  const nlohmann::json summary = run_spectrum_experiment(spec);

  CHECK(summary.at("rows").size() == 2);
  std::ifstream in(dir / "table.csv");
  std::string header, row;
  REQUIRE(std::getline(in, header));
  CHECK(header == "M,N,L,sigma1_sq_empirical,sigma1_sq_pred");
  int rows = 0;
  while (std::getline(in, row))
    if (!row.empty()) ++rows;
  CHECK(rows == 2);

  SUBCASE("rerun is identical") {
    const std::string table = slurp(dir / "table.csv");
    const auto dir2 = fresh_dir("qamp_exp_spectrum_rerun");
    spec.out_dir = dir2.string();
    run_spectrum_experiment(spec);
    CHECK(table == slurp(dir2 / "table.csv"));
  }
}

TEST_CASE("run_experiment dispatches on kind") {
  const auto dir = fresh_dir("qamp_exp_dispatch");
  ExperimentSpec spec = default_experiment_spec("spectrum");
  spec.spectrum_dims = {{100, 4}};
  spec.spectrum_trials = 1;
  spec.out_dir = dir.string();
  const nlohmann::json summary = run_experiment(spec);
  CHECK(summary.at("spec").at("kind") == "spectrum");
}
