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

#pragma once

#include <cstdint>
#include <span>

// Hot loops of the tensor library. Every kernel has an OpenMP-parallel
// version (used by the ops) and a serial reference in kernels::reference that
// the tests and the benchmark compare against.
//
// Parallel kernels split work over output rows only. Each output element is
// produced by exactly one thread with a fixed reduction order, so results are
// bitwise identical for any thread count.

namespace beacon::kernels {

// c[m×n] (+)= a[m×k] · b[k×n]
template <typename T>
void gemm_nn(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate = false);

// c[m×n] (+)= a[m×k] · b[n×k]ᵀ
template <typename T>
void gemm_nt(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate = false);

// c[k×n] (+)= a[m×k]ᵀ · b[m×n]
template <typename T>
void gemm_tn(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate = false);

// Row-wise softmax of x + mask. A null mask means no masking; -inf entries in
// the mask produce exact zeros. Throws DegenerateRowError on a fully masked row.
template <typename T>
void softmax_rows(std::span<const T> x, std::span<const T> mask, std::span<T> y,
                  std::int64_t rows, std::int64_t cols);

// y = x / rms(x) * weight per row; inv_rms receives 1/sqrt(mean(x²)+eps).
template <typename T>
void rms_norm_rows(std::span<const T> x, std::span<const T> weight, std::span<T> y,
                   std::span<T> inv_rms, std::int64_t rows, std::int64_t cols, T eps);

int max_threads();

namespace reference {

template <typename T>
void gemm_nn(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate = false);
template <typename T>
void gemm_nt(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate = false);
template <typename T>
void gemm_tn(std::span<const T> a, std::span<const T> b, std::span<T> c, std::int64_t m,
             std::int64_t k, std::int64_t n, bool accumulate = false);
template <typename T>
void softmax_rows(std::span<const T> x, std::span<const T> mask, std::span<T> y,
                  std::int64_t rows, std::int64_t cols);
template <typename T>
void rms_norm_rows(std::span<const T> x, std::span<const T> weight, std::span<T> y,
                   std::span<T> inv_rms, std::int64_t rows, std::int64_t cols, T eps);

}  // namespace reference

}  // namespace beacon::kernels
