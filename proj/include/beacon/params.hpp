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
#include <functional>
#include <string>
#include <vector>

#include "beacon/config.hpp"
#include "beacon/tensor.hpp"

namespace beacon {

// Projection weights are stored [in × out] so that y = x · W.
template <typename T>
struct LayerWeights {
  Tensor<T> attn_norm;  // [D]
  Tensor<T> wq;         // [D × hq·d]
  Tensor<T> wk;         // [D × hk·d]
  Tensor<T> wv;         // [D × hk·d]
  Tensor<T> wo;         // [hq·d × D]
  Tensor<T> mlp_norm;   // [D]
  Tensor<T> w_gate;     // [D × I]
  Tensor<T> w_up;       // [D × I]
  Tensor<T> w_down;     // [I × D]
};

// The frozen language model.
template <typename T>
struct BaseParams {
  Tensor<T> embed;  // [V × D]
  std::vector<LayerWeights<T>> layers;
  Tensor<T> final_norm;  // [D]
  Tensor<T> lm_head;     // [D × V]
};

template <typename T>
struct BeaconLayer {
  Tensor<T> wq, wk, wv;
};

// Trainable beacon parameters: per-layer Q/K/V projections for beacon rows
// and the single embedding shared by every beacon token.
template <typename T>
struct BeaconParams {
  std::vector<BeaconLayer<T>> layers;
  Tensor<T> embed;  // [D]
};

template <typename T>
struct ModelParams {
  ModelConfig config;
  BaseParams<T> base;
  BeaconParams<T> beacon;
};

template <typename T>
using TensorVisitor = std::function<void(const std::string& name, Tensor<T>& tensor)>;
template <typename T>
using ConstTensorVisitor = std::function<void(const std::string& name, const Tensor<T>& tensor)>;

// Visits tensors in a fixed order with names under "base." and "beacon.".
template <typename T>
void for_each_tensor(BaseParams<T>& base, const TensorVisitor<T>& fn);
template <typename T>
void for_each_tensor(const BaseParams<T>& base, const ConstTensorVisitor<T>& fn);
template <typename T>
void for_each_tensor(BeaconParams<T>& beacon, const TensorVisitor<T>& fn);
template <typename T>
void for_each_tensor(const BeaconParams<T>& beacon, const ConstTensorVisitor<T>& fn);

// Random base weights; beacon parameters start as a copy of the raw path
// (W^b = W^r) with the beacon embedding at the mean token embedding.
template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::uint64_t seed);

template <typename T>
void reset_beacon_from_base(ModelParams<T>& params);

// SHA-256 over names, shapes and raw bytes.
template <typename T>
std::string hash_base(const BaseParams<T>& base);
template <typename T>
std::string hash_beacon(const BeaconParams<T>& beacon);

template <typename To, typename From>
ModelParams<To> cast_params(const ModelParams<From>& src);

template <typename T>
std::int64_t count_parameters(const BaseParams<T>& base);
template <typename T>
std::int64_t count_parameters(const BeaconParams<T>& beacon);

}  // namespace beacon
