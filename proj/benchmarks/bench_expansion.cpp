#include <benchmark/benchmark.h>

#include "qamp/expansion.hpp"
#include "qamp/synthetic.hpp"

namespace {

void bm_expand_quadratic(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const qamp::FeatureMatrix x = qamp::gen_features(m, n, 1);
  for (auto _ : state) {
    auto design = qamp::expand_quadratic(x);
    const double* data = design.data.data();
    benchmark::DoNotOptimize(data);
  }
  state.SetItemsProcessed(state.iterations() * m * qamp::column_count(n));
}

void bm_normalize_columns(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const qamp::ExpandedDesign design = qamp::expand_quadratic(qamp::gen_features(m, n, 1));
  for (auto _ : state) {
    auto normalized = qamp::normalize_columns(design);
    const double* data = normalized.data.data();
    benchmark::DoNotOptimize(data);
  }
}

}  // namespace

BENCHMARK(bm_expand_quadratic)->Args({500, 10})->Args({1000, 30})->Args({2000, 60})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_normalize_columns)->Args({500, 10})->Args({1000, 30})
    ->Unit(benchmark::kMillisecond);
