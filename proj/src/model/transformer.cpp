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

#include "beacon/transformer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "beacon/ops.hpp"

namespace beacon {

TokenKindMask kinds_of(std::span<const std::int32_t> ids, std::int32_t beacon_token) {
  TokenKindMask kinds(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    kinds[i] = ids[i] == beacon_token ? TokenKind::kBeacon : TokenKind::kRaw;
  }
  return kinds;
}

template <typename T>
BoundParams bind_params(Tape<T>& tape, const ModelParams<T>& params, bool grad_base,
                        bool grad_beacon) {
  const auto& base = params.base;
  const auto& beacon = params.beacon;
  if (beacon.layers.size() != base.layers.size()) {
    throw StateError("beacon parameters do not cover every layer");
  }
  BoundParams b;
  b.embed = tape.borrow(base.embed, grad_base);
  b.final_norm = tape.borrow(base.final_norm, grad_base);
  b.lm_head = tape.borrow(base.lm_head, grad_base);
  b.beacon_embed = tape.borrow(beacon.embed, grad_beacon);
  for (std::size_t i = 0; i < base.layers.size(); ++i) {
    const auto& l = base.layers[i];
    const auto& bl = beacon.layers[i];
    b.layers.push_back(BoundLayer{
        tape.borrow(l.attn_norm, grad_base), tape.borrow(l.wq, grad_base),
        tape.borrow(l.wk, grad_base), tape.borrow(l.wv, grad_base), tape.borrow(l.wo, grad_base),
        tape.borrow(l.mlp_norm, grad_base), tape.borrow(l.w_gate, grad_base),
        tape.borrow(l.w_up, grad_base), tape.borrow(l.w_down, grad_base),
        tape.borrow(bl.wq, grad_beacon), tape.borrow(bl.wk, grad_beacon),
        tape.borrow(bl.wv, grad_beacon)});
  }
  return b;
}

Positions condensed_positions(std::int64_t past, std::int64_t rows) {
  Positions p;
  p.key.resize(static_cast<std::size_t>(past + rows));
  for (std::int64_t i = 0; i < past + rows; ++i) p.key[i] = i;
  p.query.assign(p.key.begin() + past, p.key.end());
  return p;
}

template <typename T>
Var embed(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
          std::span<const std::int32_t> ids) {
  const std::int32_t sentinel = config.beacon_token();
  std::vector<std::int64_t> raw_ids;
  std::vector<bool> is_beacon(ids.size());
  std::int64_t beacons = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::int32_t id = ids[i];
    if (id == sentinel) {
      is_beacon[i] = true;
      ++beacons;
    } else if (id >= 0 && id < config.vocab_size) {
      raw_ids.push_back(id);
    } else {
      throw DataError("unknown token id " + std::to_string(id));
    }
  }
  if (beacons == 0) return ops::gather_rows(tape, bound.embed, raw_ids);
  Var beacon_rows = ops::repeat_row(tape, bound.beacon_embed, beacons);
  if (raw_ids.empty()) return beacon_rows;
  return ops::merge_rows(tape, ops::gather_rows(tape, bound.embed, raw_ids), beacon_rows,
                         is_beacon);
}

template <typename T>
Qkv project_qkv_dual(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                     Var hidden, const TokenKindMask& kinds, std::size_t layer) {
  (void)config;
  const BoundLayer& w = bound.layers.at(layer);
  if (static_cast<std::int64_t>(kinds.size()) != tape.value(hidden).rows()) {
    throw DimensionError("project_qkv_dual: token-kind mask length differs from row count");
  }
  std::vector<std::int64_t> raw_rows, beacon_rows;
  std::vector<bool> is_beacon(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] == TokenKind::kBeacon) {
      beacon_rows.push_back(static_cast<std::int64_t>(i));
      is_beacon[i] = true;
    } else {
      raw_rows.push_back(static_cast<std::int64_t>(i));
    }
  }
  auto project = [&](Var h, Var wq, Var wk, Var wv) {
    return Qkv{ops::matmul(tape, h, wq), ops::matmul(tape, h, wk), ops::matmul(tape, h, wv)};
  };
  if (beacon_rows.empty()) return project(hidden, w.wq, w.wk, w.wv);
  const Var hb = ops::gather_rows(tape, hidden, beacon_rows);
  const Qkv b = project(hb, w.beacon_wq, w.beacon_wk, w.beacon_wv);
  if (raw_rows.empty()) return b;
  const Var hr = ops::gather_rows(tape, hidden, raw_rows);
  const Qkv r = project(hr, w.wq, w.wk, w.wv);
  return Qkv{ops::merge_rows(tape, r.q, b.q, is_beacon), ops::merge_rows(tape, r.k, b.k, is_beacon),
             ops::merge_rows(tape, r.v, b.v, is_beacon)};
}

template <typename T>
Var attend_with_cache(Tape<T>& tape, const ModelConfig& config, const Qkv& current, Var past_k,
                      Var past_v, std::span<const std::int64_t> query_positions,
                      std::span<const std::int64_t> key_positions) {
  const std::int64_t rows = tape.value(current.q).rows();
  const std::int64_t past = past_k.valid() ? tape.value(past_k).rows() : 0;
  const std::int64_t d = config.head_dim;
  if (past_k.valid() != past_v.valid() ||
      (past_v.valid() && tape.value(past_v).rows() != past)) {
    throw StateError("attend_with_cache: cached keys and values disagree in length");
  }
  if (static_cast<std::int64_t>(query_positions.size()) != rows ||
      static_cast<std::int64_t>(key_positions.size()) != past + rows) {
    throw StateError("attend_with_cache: cache holds " + std::to_string(past) +
                     " entries but positions describe " +
                     std::to_string(static_cast<std::int64_t>(key_positions.size()) - rows));
  }
  const std::int64_t keys = past + rows;

  Var k_all = past > 0 ? ops::concat_rows(tape, {past_k, current.k}) : current.k;
  Var v_all = past > 0 ? ops::concat_rows(tape, {past_v, current.v}) : current.v;
  Var q = ops::rope(tape, current.q, query_positions, d, config.rope_base);
  q = ops::scale(tape, q, static_cast<T>(1.0 / std::sqrt(static_cast<double>(d))));
  k_all = ops::rope(tape, k_all, key_positions, d, config.rope_base);

  Tensor<T> mask(Shape{rows, keys});
  for (std::int64_t i = 0; i < rows; ++i) {
    for (std::int64_t j = 0; j < keys; ++j) {
      if (key_positions[j] > query_positions[i]) mask.at(i, j) = -std::numeric_limits<T>::infinity();
    }
  }

  std::vector<Var> k_heads, v_heads;
  for (std::int64_t g = 0; g < config.kv_heads; ++g) {
    k_heads.push_back(ops::slice_cols(tape, k_all, g * d, d));
    v_heads.push_back(ops::slice_cols(tape, v_all, g * d, d));
  }
  std::vector<Var> outputs;
  const std::int64_t group = config.group_size();
  for (std::int64_t h = 0; h < config.query_heads; ++h) {
    const std::size_t g = static_cast<std::size_t>(h / group);
    Var qh = ops::slice_cols(tape, q, h * d, d);
    Var scores = ops::matmul_bt(tape, qh, k_heads[g]);
    Var weights = ops::softmax_rows(tape, scores, mask);
    outputs.push_back(ops::matmul(tape, weights, v_heads[g]));
  }
  return outputs.size() == 1 ? outputs.front() : ops::concat_cols(tape, outputs);
}

template <typename T>
LayerOutput layer_forward(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                          std::size_t layer, Var hidden, const TokenKindMask& kinds, Var past_k,
                          Var past_v, const Positions& positions) {
  const BoundLayer& w = bound.layers.at(layer);
  const T eps = static_cast<T>(config.norm_eps);
  Var normed = ops::rms_norm(tape, hidden, w.attn_norm, eps);
  Qkv qkv = project_qkv_dual(tape, config, bound, normed, kinds, layer);
  Var attn = attend_with_cache(tape, config, qkv, past_k, past_v, positions.query, positions.key);
  Var x = ops::add(tape, hidden, ops::matmul(tape, attn, w.wo));

  Var normed2 = ops::rms_norm(tape, x, w.mlp_norm, eps);
  Var gate = ops::silu(tape, ops::matmul(tape, normed2, w.w_gate));
  Var up = ops::matmul(tape, normed2, w.w_up);
  Var mlp = ops::matmul(tape, ops::mul(tape, gate, up), w.w_down);
  return LayerOutput{ops::add(tape, x, mlp), qkv.k, qkv.v};
}

template <typename T>
Var lm_logits(Tape<T>& tape, const BoundParams& bound, Var hidden, double norm_eps) {
  Var normed = ops::rms_norm(tape, hidden, bound.final_norm, static_cast<T>(norm_eps));
  return ops::matmul(tape, normed, bound.lm_head);
}

std::int64_t last_raw_row(const TokenKindMask& kinds) {
  for (std::size_t i = kinds.size(); i-- > 0;) {
    if (kinds[i] == TokenKind::kRaw) return static_cast<std::int64_t>(i);
  }
  throw UsageError("no raw token to decode from");
}

template <typename T>
ForwardResult forward_rows(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                           std::span<const std::int32_t> ids, const std::vector<Var>& past_k,
                           const std::vector<Var>& past_v, std::int64_t past_len) {
  const TokenKindMask kinds = kinds_of(ids, config.beacon_token());
  const Positions positions = condensed_positions(past_len, static_cast<std::int64_t>(ids.size()));
  ForwardResult result;
  Var h = embed(tape, config, bound, ids);
  for (std::size_t l = 0; l < bound.layers.size(); ++l) {
    const Var pk = l < past_k.size() ? past_k[l] : Var{};
    const Var pv = l < past_v.size() ? past_v[l] : Var{};
    if (!pk.valid() && past_len != 0) {
      throw StateError("forward_rows: past length " + std::to_string(past_len) +
                       " without cached keys");
    }
    LayerOutput out = layer_forward(tape, config, bound, l, h, kinds, pk, pv, positions);
    h = out.hidden;
    result.k.push_back(out.k);
    result.v.push_back(out.v);
  }
  result.hidden = h;
  return result;
}

template <typename T>
Tensor<T> vanilla_logits(const ModelParams<T>& params, std::span<const std::int32_t> ids) {
  Tape<T> tape;
  const BoundParams bound = bind_params(tape, params, false, false);
  ForwardResult fwd = forward_rows(tape, params.config, bound, ids, {}, {}, 0);
  return tape.value(lm_logits(tape, bound, fwd.hidden, params.config.norm_eps));
}

#define BEACON_INSTANTIATE_TRANSFORMER(T)                                                        \
  template BoundParams bind_params<T>(Tape<T>&, const ModelParams<T>&, bool, bool);              \
  template Var embed<T>(Tape<T>&, const ModelConfig&, const BoundParams&,                        \
                        std::span<const std::int32_t>);                                          \
  template Qkv project_qkv_dual<T>(Tape<T>&, const ModelConfig&, const BoundParams&, Var,        \
                                   const TokenKindMask&, std::size_t);                           \
  template Var attend_with_cache<T>(Tape<T>&, const ModelConfig&, const Qkv&, Var, Var,          \
                                    std::span<const std::int64_t>,                               \
                                    std::span<const std::int64_t>);                              \
  template LayerOutput layer_forward<T>(Tape<T>&, const ModelConfig&, const BoundParams&,        \
                                        std::size_t, Var, const TokenKindMask&, Var, Var,        \
                                        const Positions&);                                       \
  template Var lm_logits<T>(Tape<T>&, const BoundParams&, Var, double);                          \
  template ForwardResult forward_rows<T>(Tape<T>&, const ModelConfig&, const BoundParams&,       \
                                         std::span<const std::int32_t>, const std::vector<Var>&, \
                                         const std::vector<Var>&, std::int64_t);                 \
  template Tensor<T> vanilla_logits<T>(const ModelParams<T>&, std::span<const std::int32_t>);

BEACON_INSTANTIATE_TRANSFORMER(float)
BEACON_INSTANTIATE_TRANSFORMER(double)

}  // namespace beacon
