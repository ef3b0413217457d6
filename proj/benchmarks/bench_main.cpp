// Copyright 2026 The fbmcode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "fbmcode/codebook.hpp"
#include "fbmcode/concat_coder.hpp"
#include "fbmcode/gauss_rd.hpp"
#include "fbmcode/grid_paths.hpp"
#include "fbmcode/random_coder.hpp"

using namespace fbmcode;

static void BM_SampleFbm(benchmark::State& state) {
  const FbmSampler sampler(0.7, 1, static_cast<int>(state.range(0)));
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(RngSpec{1, k++}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleFbm)->Arg(256)->Arg(4096)->Arg(65536);

static void BM_Waterfill(benchmark::State& state) {
  const Spectrum s = exact_bm_spectrum(static_cast<std::size_t>(state.range(0)));
  double r = 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(waterfill(s, r));
    r = r < 5e3 ? r * 1.1 : 10.0;
  }
}
BENCHMARK(BM_Waterfill)->Arg(10'000)->Arg(1'000'000);

static void BM_CovarianceSpectrum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(covariance_spectrum(0.3, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_CovarianceSpectrum)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_NearestSup(benchmark::State& state) {
  const RandomPool pool = RandomPool::build(0.5, 64, static_cast<std::size_t>(state.range(0)), RngSpec{2, 0});
  const Codebook cb(pool.paths());
  const SampledPath x = sample_fbm(0.5, 1, 64, RngSpec{3, 0});
  for (auto _ : state) benchmark::DoNotOptimize(nearest(cb, x, Norm::sup()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NearestSup)->Arg(1'000)->Arg(10'000);

static void BM_ConcatEncode(benchmark::State& state) {
  RandomBaseConfig config;
  config.n_per_unit = 16;
  config.pool_size = 128;
  config.training_blocks = 512;
  const BaseQuantizer base = make_random_base(config, RngSpec{4, 0});
  const int n = static_cast<int>(state.range(0));
  const SampledPath w = sample_fbm(0.5, n, 16, RngSpec{5, 0});
  for (auto _ : state) benchmark::DoNotOptimize(encode_concat(w, base, ConcatParams{3, 1.0}));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ConcatEncode)->Arg(8)->Arg(128);
BENCHMARK_MAIN();
