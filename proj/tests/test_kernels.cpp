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

#include <array>
#include <cmath>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "beacon/errors.hpp"
#include "beacon/kernels.hpp"
#include "doctest.h"

using namespace beacon;

namespace {

template <typename T>
std::vector<T> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(dist(rng));
  return v;
}

template <typename T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(double(a[i]) - double(b[i])));
  return m;
}

}  // namespace

TEST_CASE_TEMPLATE("parallel gemm kernels agree with the serial reference", T, float, double) {
  const double tol = sizeof(T) == 4 ? 1e-4 : 1e-11;
  for (auto [m, k, n] : {std::array<std::int64_t, 3>{1, 1, 1}, {3, 5, 7}, {4, 32, 32},
                         {37, 19, 70}, {96, 128, 256}, {5, 200, 33}}) {
    CAPTURE(m);
    CAPTURE(k);
    CAPTURE(n);
    auto a = random_vec<T>(m * k, 1);
    auto b = random_vec<T>(k * n, 2);
    auto bt = random_vec<T>(n * k, 3);
    auto am = random_vec<T>(m * n, 4);
    std::vector<T> c(m * n), r(m * n);

    kernels::gemm_nn<T>(a, b, c, m, k, n);
    kernels::reference::gemm_nn<T>(a, b, r, m, k, n);
    CHECK(max_abs_diff(c, r) < tol);

    kernels::gemm_nt<T>(a, bt, c, m, k, n);
    kernels::reference::gemm_nt<T>(a, bt, r, m, k, n);
    CHECK(max_abs_diff(c, r) < tol);

    std::vector<T> ck(k * n), rk(k * n);
    kernels::gemm_tn<T>(a, am, ck, m, k, n);
    kernels::reference::gemm_tn<T>(a, am, rk, m, k, n);
    CHECK(max_abs_diff(ck, rk) < tol);

    // accumulate mode adds onto the existing contents
    std::vector<T> acc(m * n, T{1});
    kernels::gemm_nn<T>(a, b, acc, m, k, n, true);
    kernels::reference::gemm_nn<T>(a, b, r, m, k, n);
    for (auto& v : r) v += T{1};
    CHECK(max_abs_diff(acc, r) < tol);
  }
}

TEST_CASE("gemm output is bitwise identical across thread counts") {
#ifdef _OPENMP
  const std::int64_t m = 67, k = 129, n = 161;
  auto a = random_vec<float>(m * k, 7);
  auto b = random_vec<float>(k * n, 8);
  std::vector<float> one(m * n), many(m * n);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  kernels::gemm_nn<float>(a, b, one, m, k, n);
  omp_set_num_threads(4);
  kernels::gemm_nn<float>(a, b, many, m, k, n);
  omp_set_num_threads(saved);
  CHECK(one == many);
#endif
}

TEST_CASE("gemm rejects undersized operands") {
  std::vector<float> a(4), b(3), c(4);
  CHECK_THROWS_AS(kernels::gemm_nn<float>(a, b, c, 2, 2, 2), DimensionError);
}

TEST_CASE("row kernels agree with the serial reference") {
  const std::int64_t rows = 300, cols = 130;
  auto x = random_vec<double>(rows * cols, 11);
  auto w = random_vec<double>(cols, 12);
  std::vector<double> mask(rows * cols, 0.0);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = r % cols + 1; c < cols; ++c) mask[r * cols + c] = -INFINITY;
  std::vector<double> y(rows * cols), yr(rows * cols), inv(rows), invr(rows);
  kernels::softmax_rows<double>(x, mask, y, rows, cols);
  kernels::reference::softmax_rows<double>(x, mask, yr, rows, cols);
  CHECK(y == yr);
  kernels::rms_norm_rows<double>(x, w, y, inv, rows, cols, 1e-5);
  kernels::reference::rms_norm_rows<double>(x, w, yr, invr, rows, cols, 1e-5);
  CHECK(y == yr);
  CHECK(inv == invr);
}
