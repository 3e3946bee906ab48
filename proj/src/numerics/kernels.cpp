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

#include "beacon/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "beacon/errors.hpp"

namespace beacon::kernels {
namespace {

// Below this many multiply-adds the parallel region costs more than it saves.
constexpr std::int64_t kParallelWork = 1 << 15;

template <typename T>
constexpr std::int64_t kTileCols = 128 / sizeof(T);  // two 512-bit lanes
constexpr std::int64_t kTileRows = 4;

// Computes rows [r0, r0 + rows) of c = a · b for one row tile. Every element
// is reduced over p in ascending order, starting from zero.
template <typename T, std::int64_t Rows>
void tile_nn(const T* a, const T* b, T* c, std::int64_t r0, std::int64_t k, std::int64_t n,
             bool accumulate) {
  constexpr std::int64_t cols = kTileCols<T>;
  std::int64_t j0 = 0;
  for (; j0 + cols <= n; j0 += cols) {
    T acc[Rows][cols] = {};
    for (std::int64_t p = 0; p < k; ++p) {
      const T* bp = b + p * n + j0;
      for (std::int64_t r = 0; r < Rows; ++r) {
        const T ar = a[(r0 + r) * k + p];
        for (std::int64_t j = 0; j < cols; ++j) acc[r][j] += ar * bp[j];
      }
    }
    for (std::int64_t r = 0; r < Rows; ++r) {
      T* cr = c + (r0 + r) * n + j0;
      for (std::int64_t j = 0; j < cols; ++j) cr[j] = accumulate ? cr[j] + acc[r][j] : acc[r][j];
    }
  }
  if (j0 < n) {
    const std::int64_t rem = n - j0;
    T acc[Rows][cols] = {};
    for (std::int64_t p = 0; p < k; ++p) {
      const T* bp = b + p * n + j0;
      for (std::int64_t r = 0; r < Rows; ++r) {
        const T ar = a[(r0 + r) * k + p];
        for (std::int64_t j = 0; j < rem; ++j) acc[r][j] += ar * bp[j];
      }
    }
    for (std::int64_t r = 0; r < Rows; ++r) {
      T* cr = c + (r0 + r) * n + j0;
      for (std::int64_t j = 0; j < rem; ++j) cr[j] = accumulate ? cr[j] + acc[r][j] : acc[r][j];
    }
  }
}

template <typename T>
void gemm_nn_raw(const T* a, const T* b, T* c, std::int64_t m, std::int64_t k, std::int64_t n,
                 bool accumulate) {
  const std::int64_t full_tiles = m / kTileRows;
  const bool parallel = m * k * n >= kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t t = 0; t < full_tiles; ++t) {
    tile_nn<T, kTileRows>(a, b, c, t * kTileRows, k, n, accumulate);
  }
  for (std::int64_t r = full_tiles * kTileRows; r < m; ++r) {
    tile_nn<T, 1>(a, b, c, r, k, n, accumulate);
  }
}

template <typename T>
std::vector<T> transpose(const T* x, std::int64_t rows, std::int64_t cols) {
  std::vector<T> out(static_cast<std::size_t>(rows * cols));
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) out[c * rows + r] = x[r * cols + c];
  }
  return out;
}

template <typename T>
void check_sizes(std::size_t a, std::size_t b, std::size_t c, std::int64_t ea, std::int64_t eb,
                 std::int64_t ec) {
  if (static_cast<std::int64_t>(a) < ea || static_cast<std::int64_t>(b) < eb ||
      static_cast<std::int64_t>(c) < ec) {
    throw DimensionError("gemm operand smaller than its declared dimensions");
  }
}

template <typename T>
void softmax_row(const T* x, const T* mask, T* y, std::int64_t cols) {
  T max_v = -std::numeric_limits<T>::infinity();
  for (std::int64_t j = 0; j < cols; ++j) {
    const T v = mask ? x[j] + mask[j] : x[j];
    y[j] = v;
    max_v = std::max(max_v, v);
  }
  if (max_v == -std::numeric_limits<T>::infinity()) {
    throw DegenerateRowError("softmax row has no unmasked entry");
  }
  T sum = 0;
  for (std::int64_t j = 0; j < cols; ++j) {
    y[j] = std::exp(y[j] - max_v);
    sum += y[j];
  }
  const T inv = T{1} / sum;
  for (std::int64_t j = 0; j < cols; ++j) y[j] *= inv;
}

template <typename T>
void rms_norm_row(const T* x, const T* w, T* y, T* inv_rms, std::int64_t cols, T eps) {
  T ss = 0;
  for (std::int64_t j = 0; j < cols; ++j) ss += x[j] * x[j];
  const T inv = T{1} / std::sqrt(ss / static_cast<T>(cols) + eps);
  *inv_rms = inv;
  for (std::int64_t j = 0; j < cols; ++j) y[j] = x[j] * inv * w[j];
}

}  // namespace

template <typename T>
void gemm_nn(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate) {
  check_sizes<T>(a.size(), b.size(), c.size(), m * k, k * n, m * n);
  gemm_nn_raw(a.data(), b.data(), c.data(), m, k, n, accumulate);
}

template <typename T>
void gemm_nt(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate) {
  check_sizes<T>(a.size(), b.size(), c.size(), m * k, n * k, m * n);
  const std::vector<T> bt = transpose(b.data(), n, k);
  gemm_nn_raw(a.data(), bt.data(), c.data(), m, k, n, accumulate);
}

template <typename T>
void gemm_tn(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate) {
  check_sizes<T>(a.size(), b.size(), c.size(), m * k, m * n, k * n);
  const std::vector<T> at = transpose(a.data(), m, k);
  gemm_nn_raw(at.data(), b.data(), c.data(), k, m, n, accumulate);
}

template <typename T>
void softmax_rows(std::span<const T> x, std::span<const T> mask, std::span<T> y,
                  std::int64_t rows, std::int64_t cols) {
  const T* mp = mask.empty() ? nullptr : mask.data();
  // Exceptions must not escape an OpenMP region; record and rethrow.
  bool degenerate = false;
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelWork)
  for (std::int64_t r = 0; r < rows; ++r) {
    try {
      softmax_row(x.data() + r * cols, mp ? mp + r * cols : nullptr, y.data() + r * cols, cols);
    } catch (const DegenerateRowError&) {
#pragma omp atomic write
      degenerate = true;
    }
  }
  if (degenerate) throw DegenerateRowError("softmax row has no unmasked entry");
}

template <typename T>
void rms_norm_rows(std::span<const T> x, std::span<const T> weight, std::span<T> y,
                   std::span<T> inv_rms, std::int64_t rows, std::int64_t cols, T eps) {
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelWork)
  for (std::int64_t r = 0; r < rows; ++r) {
    rms_norm_row(x.data() + r * cols, weight.data(), y.data() + r * cols, inv_rms.data() + r,
                 cols, eps);
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace reference {

template <typename T>
void gemm_nn(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate) {
  check_sizes<T>(a.size(), b.size(), c.size(), m * k, k * n, m * n);
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      T sum = 0;
      for (std::int64_t p = 0; p < k; ++p) sum += a[i * k + p] * b[p * n + j];
      c[i * n + j] = accumulate ? c[i * n + j] + sum : sum;
    }
  }
}

template <typename T>
void gemm_nt(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate) {
  check_sizes<T>(a.size(), b.size(), c.size(), m * k, n * k, m * n);
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      T sum = 0;
      for (std::int64_t p = 0; p < k; ++p) sum += a[i * k + p] * b[j * k + p];
      c[i * n + j] = accumulate ? c[i * n + j] + sum : sum;
    }
  }
}

template <typename T>
void gemm_tn(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate) {
  check_sizes<T>(a.size(), b.size(), c.size(), m * k, m * n, k * n);
  for (std::int64_t p = 0; p < k; ++p) {
    for (std::int64_t j = 0; j < n; ++j) {
      T sum = 0;
      for (std::int64_t i = 0; i < m; ++i) sum += a[i * k + p] * b[i * n + j];
      c[p * n + j] = accumulate ? c[p * n + j] + sum : sum;
    }
  }
}

template <typename T>
void softmax_rows(std::span<const T> x, std::span<const T> mask, std::span<T> y,
                  std::int64_t rows, std::int64_t cols) {
  const T* mp = mask.empty() ? nullptr : mask.data();
  for (std::int64_t r = 0; r < rows; ++r) {
    softmax_row(x.data() + r * cols, mp ? mp + r * cols : nullptr, y.data() + r * cols, cols);
  }
}

template <typename T>
void rms_norm_rows(std::span<const T> x, std::span<const T> weight, std::span<T> y,
                   std::span<T> inv_rms, std::int64_t rows, std::int64_t cols, T eps) {
  for (std::int64_t r = 0; r < rows; ++r) {
    rms_norm_row(x.data() + r * cols, weight.data(), y.data() + r * cols, inv_rms.data() + r,
                 cols, eps);
  }
}

}  // namespace reference

#define BEACON_INSTANTIATE_KERNELS(NS, T)                                                     \
  template void NS::gemm_nn<T>(std::span<const T>, std::span<const T>, std::span<T>,          \
                               std::int64_t, std::int64_t, std::int64_t, bool);               \
  template void NS::gemm_nt<T>(std::span<const T>, std::span<const T>, std::span<T>,          \
                               std::int64_t, std::int64_t, std::int64_t, bool);               \
  template void NS::gemm_tn<T>(std::span<const T>, std::span<const T>, std::span<T>,          \
                               std::int64_t, std::int64_t, std::int64_t, bool);               \
  template void NS::softmax_rows<T>(std::span<const T>, std::span<const T>, std::span<T>,     \
                                    std::int64_t, std::int64_t);                              \
  template void NS::rms_norm_rows<T>(std::span<const T>, std::span<const T>, std::span<T>,    \
                                     std::span<T>, std::int64_t, std::int64_t, T);

}  // namespace beacon::kernels

BEACON_INSTANTIATE_KERNELS(beacon::kernels, float)
BEACON_INSTANTIATE_KERNELS(beacon::kernels, double)
BEACON_INSTANTIATE_KERNELS(beacon::kernels::reference, float)
BEACON_INSTANTIATE_KERNELS(beacon::kernels::reference, double)
