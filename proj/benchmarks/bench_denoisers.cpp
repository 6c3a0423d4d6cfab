#include <benchmark/benchmark.h>

#include "qamp/priors.hpp"
#include "qamp/rng.hpp"
#include "qamp/synthetic.hpp"

namespace {

void bm_bg_denoise(benchmark::State& state) {
  const qamp::BgPrior prior{0.2, 1.0};
  qamp::Rng rng(2);
  std::vector<double> qs(4096);
  for (double& q : qs) q = rng.normal(0.0, 2.0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qamp::bg_denoise(qs[i++ & 4095], 0.25, prior));
  }
}

void bm_bg_denoise_derivative(benchmark::State& state) {
  const qamp::BgPrior prior{0.2, 1.0};
  qamp::Rng rng(3);
  std::vector<double> qs(4096);
  for (double& q : qs) q = rng.normal(0.0, 2.0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qamp::bg_denoise_derivative(qs[i++ & 4095], 0.25, prior));
  }
}

// Full L-wide denoising pass, the inner kernel of one AMP iteration.
void bm_grouped_denoise(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto design = qamp::expand_quadratic(qamp::gen_features(4, n, 4));
  qamp::GroupPriorSet priors;
  priors.dc = {10.0};
  priors.linear = {0.2, 1.0};
  priors.quadratic = {0.2, 0.5};
  priors.cross = {0.03, 0.1};
  qamp::Rng rng(5);
  Eigen::VectorXd q(design.cols());
  for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = rng.normal();
  for (auto _ : state) {
    auto res = qamp::grouped_denoise(q, 0.3, priors, design.groups);
    double mean_derivative = res.mean_derivative;
    benchmark::DoNotOptimize(mean_derivative);
  }
  state.SetItemsProcessed(state.iterations() * design.cols());
}

}  // namespace

BENCHMARK(bm_bg_denoise);
BENCHMARK(bm_bg_denoise_derivative);
BENCHMARK(bm_grouped_denoise)->Arg(30)->Arg(100)->Unit(benchmark::kMicrosecond);
