// Copyright 2026 The Beacon Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "beacon/compressor.hpp"
#include "beacon/kernels.hpp"
#include "beacon/params.hpp"
#include "beacon/tokenizer.hpp"
#include "beacon/trainer.hpp"

namespace {

using namespace beacon;

std::vector<float> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> nd(0.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

// Shapes: rows of a chunk (64 raw + 32 beacons) against the desk model widths.
template <bool kParallel>
void BM_GemmNN(benchmark::State& state) {
  const std::int64_t m = state.range(0), k = state.range(1), n = state.range(2);
  const auto a = random_vec(static_cast<std::size_t>(m * k), 1);
  const auto b = random_vec(static_cast<std::size_t>(k * n), 2);
  std::vector<float> c(static_cast<std::size_t>(m * n));
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::gemm_nn<float>(a, b, c, m, k, n);
    } else {
      kernels::reference::gemm_nn<float>(a, b, c, m, k, n);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["GFLOP/s"] =
      benchmark::Counter(2.0 * static_cast<double>(m * k * n), benchmark::Counter::kIsIterationInvariantRate,
                         benchmark::Counter::kIs1000);
}

template <bool kParallel>
void BM_GemmNT(benchmark::State& state) {
  const std::int64_t m = state.range(0), k = state.range(1), n = state.range(2);
  const auto a = random_vec(static_cast<std::size_t>(m * k), 3);
  const auto b = random_vec(static_cast<std::size_t>(n * k), 4);
  std::vector<float> c(static_cast<std::size_t>(m * n));
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::gemm_nt<float>(a, b, c, m, k, n);
    } else {
      kernels::reference::gemm_nt<float>(a, b, c, m, k, n);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["GFLOP/s"] =
      benchmark::Counter(2.0 * static_cast<double>(m * k * n), benchmark::Counter::kIsIterationInvariantRate,
                         benchmark::Counter::kIs1000);
}

template <bool kParallel>
void BM_GemmTN(benchmark::State& state) {
  const std::int64_t m = state.range(0), k = state.range(1), n = state.range(2);
  const auto a = random_vec(static_cast<std::size_t>(m * k), 5);
  const auto b = random_vec(static_cast<std::size_t>(m * n), 6);
  std::vector<float> c(static_cast<std::size_t>(k * n));
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::gemm_tn<float>(a, b, c, m, k, n);
    } else {
      kernels::reference::gemm_tn<float>(a, b, c, m, k, n);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["GFLOP/s"] =
      benchmark::Counter(2.0 * static_cast<double>(m * k * n), benchmark::Counter::kIsIterationInvariantRate,
                         benchmark::Counter::kIs1000);
}

template <bool kParallel>
void BM_Softmax(benchmark::State& state) {
  const std::int64_t rows = state.range(0), cols = state.range(1);
  const auto x = random_vec(static_cast<std::size_t>(rows * cols), 7);
  std::vector<float> y(x.size());
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::softmax_rows<float>(x, {}, y, rows, cols);
    } else {
      kernels::reference::softmax_rows<float>(x, {}, y, rows, cols);
    }
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool kParallel>
void BM_RmsNorm(benchmark::State& state) {
  const std::int64_t rows = state.range(0), cols = state.range(1);
  const auto x = random_vec(static_cast<std::size_t>(rows * cols), 8);
  const std::vector<float> w(static_cast<std::size_t>(cols), 1.0f);
  std::vector<float> y(x.size()), inv(static_cast<std::size_t>(rows));
  for (auto _ : state) {
    if constexpr (kParallel) {
      kernels::rms_norm_rows<float>(x, w, y, inv, rows, cols, 1e-5f);
    } else {
      kernels::reference::rms_norm_rows<float>(x, w, y, inv, rows, cols, 1e-5f);
    }
    benchmark::DoNotOptimize(y.data());
  }
}

// End to end on the desk model: compress a 4-chunk context at ratio 2.
void BM_Compress(benchmark::State& state) {
  const ModelConfig config;
  const auto params = init_params<float>(config, 1);
  const auto tokens = ByteTokenizer::encode(std::string(static_cast<std::size_t>(state.range(0)), 'a'));
  const auto policy = RatioPolicy::constant(2);
  for (auto _ : state) benchmark::DoNotOptimize(compress_context(params, tokens, policy).m);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// One beacon-phase optimizer step on a 4-chunk example.
void BM_TrainStep(benchmark::State& state) {
  const ModelConfig config;
  auto params = init_params<float>(config, 1);
  auto opt = make_optimizer(params, Phase::kBeacon, OptimizerConfig{});
  RatioSchedule schedule(config.ratio_set, RatioMode::kChunkWise, 1);
  std::vector<TrainExample> batch(1);
  batch[0].tokens = ByteTokenizer::encode(std::string(256, 'a'));
  batch[0].tokens.push_back(ByteTokenizer::kEos);
  for (auto _ : state) benchmark::DoNotOptimize(train_step<float>(batch, params, opt, schedule).loss);
}

void GemmShapes(benchmark::internal::Benchmark* b) {
  b->Args({96, 128, 128})->Args({96, 128, 512})->Args({96, 512, 128})->Args({96, 128, 256});
}

}  // namespace

BENCHMARK(BM_GemmNN<true>)->Apply(GemmShapes)->Name("gemm_nn/parallel");
BENCHMARK(BM_GemmNN<false>)->Apply(GemmShapes)->Name("gemm_nn/reference");
BENCHMARK(BM_GemmNT<true>)->Apply(GemmShapes)->Name("gemm_nt/parallel");
BENCHMARK(BM_GemmNT<false>)->Apply(GemmShapes)->Name("gemm_nt/reference");
BENCHMARK(BM_GemmTN<true>)->Apply(GemmShapes)->Name("gemm_tn/parallel");
BENCHMARK(BM_GemmTN<false>)->Apply(GemmShapes)->Name("gemm_tn/reference");
BENCHMARK(BM_Softmax<true>)->Args({96, 160})->Args({1024, 1024})->Name("softmax_rows/parallel");
BENCHMARK(BM_Softmax<false>)->Args({96, 160})->Args({1024, 1024})->Name("softmax_rows/reference");
BENCHMARK(BM_RmsNorm<true>)->Args({96, 128})->Args({1024, 1024})->Name("rms_norm_rows/parallel");
BENCHMARK(BM_RmsNorm<false>)->Args({96, 128})->Args({1024, 1024})->Name("rms_norm_rows/reference");
BENCHMARK(BM_Compress)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
