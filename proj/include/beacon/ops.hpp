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
#include <vector>

#include "beacon/tape.hpp"
#include "beacon/tensor.hpp"

// Differentiable primitives. Every op reads its inputs from the tape, records
// its output, and registers the matching gradient rule. Rank >= 2 inputs are
// treated as matrices of rows() × cols().

namespace beacon::ops {

template <typename T>
Var matmul(Tape<T>& tape, Var a, Var b);

// a · bᵀ with a[m×k], b[n×k].
template <typename T>
Var matmul_bt(Tape<T>& tape, Var a, Var b);

template <typename T>
Var add(Tape<T>& tape, Var a, Var b);

template <typename T>
Var mul(Tape<T>& tape, Var a, Var b);

template <typename T>
Var scale(Tape<T>& tape, Var a, T factor);

template <typename T>
Var silu(Tape<T>& tape, Var a);

// Sum of all elements, as a scalar.
template <typename T>
Var sum(Tape<T>& tape, Var a);

// Additive mask, same shape as x, -inf at forbidden entries. An empty mask
// disables masking.
template <typename T>
Var softmax_rows(Tape<T>& tape, Var x, const Tensor<T>& mask = {});

template <typename T>
Var rms_norm(Tape<T>& tape, Var x, Var weight, T eps);

// Rotary embedding over x[t × heads·head_dim] with one position per row.
// Adjacent pairs (2j, 2j+1) of each head rotate by pos · base^(-2j/head_dim).
template <typename T>
Var rope(Tape<T>& tape, Var x, std::span<const std::int64_t> positions, std::int64_t head_dim,
         double base);

struct CrossEntropy {
  Var loss;
  std::int64_t count = 0;  // non-ignored positions
};

// Mean negative log-likelihood over labels != ignore_label. When every label
// is ignored the loss is a constant 0 and count is 0.
template <typename T>
CrossEntropy cross_entropy(Tape<T>& tape, Var logits, std::span<const std::int32_t> labels,
                           std::int32_t ignore_label);

template <typename T>
Var gather_rows(Tape<T>& tape, Var x, std::span<const std::int64_t> rows);

// Rows in order of take_second: false draws the next row of a, true the next
// row of b. Both inputs must be consumed exactly.
template <typename T>
Var merge_rows(Tape<T>& tape, Var a, Var b, const std::vector<bool>& take_second);

// Replicates a single row vector count times.
template <typename T>
Var repeat_row(Tape<T>& tape, Var row, std::int64_t count);

template <typename T>
Var concat_rows(Tape<T>& tape, const std::vector<Var>& parts);

template <typename T>
Var slice_cols(Tape<T>& tape, Var x, std::int64_t start, std::int64_t width);

template <typename T>
Var concat_cols(Tape<T>& tape, const std::vector<Var>& parts);

}  // namespace beacon::ops
