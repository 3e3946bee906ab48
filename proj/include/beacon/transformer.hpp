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

#include "beacon/params.hpp"
#include "beacon/tape.hpp"

namespace beacon {

enum class TokenKind : std::uint8_t { kRaw, kBeacon };
using TokenKindMask = std::vector<TokenKind>;

// Flags each id as raw or beacon (the config's beacon sentinel).
TokenKindMask kinds_of(std::span<const std::int32_t> ids, std::int32_t beacon_token);

// Parameters recorded on a tape. Base and beacon tensors are borrowed, not
// copied; the ModelParams must outlive the tape.
struct BoundLayer {
  Var attn_norm, wq, wk, wv, wo, mlp_norm, w_gate, w_up, w_down;
  Var beacon_wq, beacon_wk, beacon_wv;
};

struct BoundParams {
  Var embed, final_norm, lm_head, beacon_embed;
  std::vector<BoundLayer> layers;
};

template <typename T>
BoundParams bind_params(Tape<T>& tape, const ModelParams<T>& params, bool grad_base,
                        bool grad_beacon);

// Positions under condensed numbering: past entries (accumulated beacons and
// any raw local tail) occupy 0..past-1 and the current rows follow.
struct Positions {
  std::vector<std::int64_t> query;
  std::vector<std::int64_t> key;
};
Positions condensed_positions(std::int64_t past, std::int64_t rows);

// Raw ids look up the base embedding table; beacon sentinels all map to the
// shared beacon embedding. Throws DataError on an unknown id.
template <typename T>
Var embed(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
          std::span<const std::int32_t> ids);

struct Qkv {
  Var q, k, v;
};

// Raw rows go through W^r, beacon rows through W^b, and the results are
// scattered back into sequence order.
template <typename T>
Qkv project_qkv_dual(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                     Var hidden, const TokenKindMask& kinds, std::size_t layer);

// Causal attention of the current rows over {past; current}. K and V (past
// and current) are unrotated; rotation happens here at the given positions.
// An invalid past Var means there is no past. Returns [rows × hq·d].
template <typename T>
Var attend_with_cache(Tape<T>& tape, const ModelConfig& config, const Qkv& current, Var past_k,
                      Var past_v, std::span<const std::int64_t> query_positions,
                      std::span<const std::int64_t> key_positions);

struct LayerOutput {
  Var hidden;
  Var k, v;  // unrotated, for every row of the input
};

// Pre-norm attention block then pre-norm gated MLP, both with residuals.
template <typename T>
LayerOutput layer_forward(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                          std::size_t layer, Var hidden, const TokenKindMask& kinds, Var past_k,
                          Var past_v, const Positions& positions);

// Final norm and LM head over every row of hidden.
template <typename T>
Var lm_logits(Tape<T>& tape, const BoundParams& bound, Var hidden, double norm_eps);

// Index of the last raw row; UsageError when there is none.
std::int64_t last_raw_row(const TokenKindMask& kinds);

struct ForwardResult {
  Var hidden;  // last layer output, before the final norm
  std::vector<Var> k, v;  // per layer, unrotated, all rows
};

// Runs every layer over ids given per-layer past K/V (empty vectors or
// invalid Vars for no past) spanning past_len condensed positions.
template <typename T>
ForwardResult forward_rows(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                           std::span<const std::int32_t> ids, const std::vector<Var>& past_k,
                           const std::vector<Var>& past_v, std::int64_t past_len);

// Plain causal LM over raw tokens: logits for every position.
template <typename T>
Tensor<T> vanilla_logits(const ModelParams<T>& params, std::span<const std::int32_t> ids);

}  // namespace beacon
