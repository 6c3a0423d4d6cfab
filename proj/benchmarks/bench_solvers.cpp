#include <benchmark/benchmark.h>

#include "qamp/amp.hpp"
#include "qamp/baselines.hpp"
#include "qamp/experiments.hpp"
#include "qamp/synthetic.hpp"

namespace {

struct Instance {
  qamp::ExpandedDesign train;
  Eigen::VectorXd y;
};

Instance planted(int n, int m) {
  qamp::BayesModelSpec spec;
  spec.n = n;
  spec.m = m + 1;
  spec.noise_var = 0.004;
  spec.priors = qamp::default_planted_priors();
  spec.seed = 6;
  const qamp::Dataset data = qamp::gen_bayes_dataset(spec, 1);
  return {qamp::normalize_columns(qamp::expand_quadratic(data.x_train)), data.y_train};
}

void bm_amp_step(benchmark::State& state) {
  const Instance inst = planted(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const qamp::GroupPriorSet priors = qamp::default_planted_priors();
  qamp::AmpConfig cfg;
  qamp::AmpState s = qamp::amp_init(inst.train, inst.y);
  for (auto _ : state) {
    qamp::amp_step(s, inst.train, inst.y, priors, cfg);
    double sigma2 = s.sigma2_eff;
    benchmark::DoNotOptimize(sigma2);
  }
}

void bm_amp_sweep_step(benchmark::State& state) {
  const Instance inst = planted(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const qamp::GroupPriorSet priors = qamp::default_planted_priors();
  qamp::AmpConfig cfg;
  cfg.variant = qamp::AmpVariant::Sweep;
  qamp::AmpState s = qamp::amp_init(inst.train, inst.y);
  for (auto _ : state) {
    qamp::amp_sweep_step(s, inst.train, inst.y, priors, cfg);
    double sigma2 = s.sigma2_eff;
    benchmark::DoNotOptimize(sigma2);
  }
}

void bm_lasso_sweep(benchmark::State& state) {
  const Instance inst = planted(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  qamp::LassoConfig cfg;
  cfg.equalize = true;
  cfg.lambdas[0] = 0.1;
  cfg.max_iters = 1;  // cost of a single coordinate sweep
  for (auto _ : state) {
    auto res = qamp::lasso_cd(inst.train, inst.y, cfg);
    int iters = res.iterations_used;
    benchmark::DoNotOptimize(iters);
  }
}

}  // namespace

BENCHMARK(bm_amp_step)->Args({30, 520})->Args({60, 2000})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_amp_sweep_step)->Args({30, 520})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_lasso_sweep)->Args({30, 520})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
