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

#include "beacon/params.hpp"

#include <cmath>
#include <cstring>
#include <random>

namespace beacon {

template <typename T>
void for_each_tensor(BaseParams<T>& base, const TensorVisitor<T>& fn) {
  fn("base.embed", base.embed);
  for (std::size_t i = 0; i < base.layers.size(); ++i) {
    auto& l = base.layers[i];
    const std::string p = "base.layers." + std::to_string(i) + ".";
    fn(p + "attn_norm", l.attn_norm);
    fn(p + "wq", l.wq);
    fn(p + "wk", l.wk);
    fn(p + "wv", l.wv);
    fn(p + "wo", l.wo);
    fn(p + "mlp_norm", l.mlp_norm);
    fn(p + "w_gate", l.w_gate);
    fn(p + "w_up", l.w_up);
    fn(p + "w_down", l.w_down);
  }
  fn("base.final_norm", base.final_norm);
  fn("base.lm_head", base.lm_head);
}

template <typename T>
void for_each_tensor(const BaseParams<T>& base, const ConstTensorVisitor<T>& fn) {
  for_each_tensor(const_cast<BaseParams<T>&>(base),
                  TensorVisitor<T>([&fn](const std::string& n, Tensor<T>& t) { fn(n, t); }));
}

template <typename T>
void for_each_tensor(BeaconParams<T>& beacon, const TensorVisitor<T>& fn) {
  fn("beacon.embed", beacon.embed);
  for (std::size_t i = 0; i < beacon.layers.size(); ++i) {
    auto& l = beacon.layers[i];
    const std::string p = "beacon.layers." + std::to_string(i) + ".";
    fn(p + "wq", l.wq);
    fn(p + "wk", l.wk);
    fn(p + "wv", l.wv);
  }
}

template <typename T>
void for_each_tensor(const BeaconParams<T>& beacon, const ConstTensorVisitor<T>& fn) {
  for_each_tensor(const_cast<BeaconParams<T>&>(beacon),
                  TensorVisitor<T>([&fn](const std::string& n, Tensor<T>& t) { fn(n, t); }));
}

namespace {

template <typename T>
Tensor<T> normal(Shape shape, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor<T> t(std::move(shape));
  for (auto& v : t.data) v = static_cast<T>(dist(rng));
  return t;
}

template <typename Params, typename T>
std::string hash_tensors(const Params& params) {
  std::string bytes;
  for_each_tensor(params, ConstTensorVisitor<T>([&bytes](const std::string& name, const Tensor<T>& t) {
    bytes += name;
    bytes.push_back('\0');
    for (std::int64_t d : t.shape) bytes += std::to_string(d) + ",";
    bytes.push_back('\0');
    bytes.append(reinterpret_cast<const char*>(t.data.data()), t.data.size() * sizeof(T));
  }));
  return sha256_hex(bytes);
}

}  // namespace

template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  const std::int64_t D = config.hidden_size, I = config.intermediate_size, V = config.vocab_size;
  const std::int64_t qw = config.query_heads * config.head_dim, kw = config.kv_width();
  const double in_std = 1.0 / std::sqrt(static_cast<double>(D));
  // Residual-branch outputs are scaled down with depth.
  const double out_scale = 1.0 / std::sqrt(2.0 * static_cast<double>(config.num_layers));

  ModelParams<T> p;
  p.config = config;
  p.base.embed = normal<T>({V, D}, 1.0, rng);
  for (std::int64_t l = 0; l < config.num_layers; ++l) {
    LayerWeights<T> w;
    w.attn_norm = Tensor<T>({D}, T{1});
    w.wq = normal<T>({D, qw}, in_std, rng);
    w.wk = normal<T>({D, kw}, in_std, rng);
    w.wv = normal<T>({D, kw}, in_std, rng);
    w.wo = normal<T>({qw, D}, out_scale / std::sqrt(static_cast<double>(qw)), rng);
    w.mlp_norm = Tensor<T>({D}, T{1});
    w.w_gate = normal<T>({D, I}, in_std, rng);
    w.w_up = normal<T>({D, I}, in_std, rng);
    w.w_down = normal<T>({I, D}, out_scale / std::sqrt(static_cast<double>(I)), rng);
    p.base.layers.push_back(std::move(w));
  }
  p.base.final_norm = Tensor<T>({D}, T{1});
  // Near-uniform initial predictions.
  p.base.lm_head = normal<T>({D, V}, 0.1 * in_std, rng);
  reset_beacon_from_base(p);
  return p;
}

template <typename T>
void reset_beacon_from_base(ModelParams<T>& params) {
  const auto& base = params.base;
  auto& beacon = params.beacon;
  beacon.layers.clear();
  for (const auto& l : base.layers) beacon.layers.push_back(BeaconLayer<T>{l.wq, l.wk, l.wv});
  const std::int64_t V = base.embed.rows(), D = base.embed.cols();
  beacon.embed = Tensor<T>({D});
  std::vector<double> mean(static_cast<std::size_t>(D), 0.0);
  for (std::int64_t r = 0; r < V; ++r) {
    for (std::int64_t c = 0; c < D; ++c) mean[c] += base.embed.at(r, c);
  }
  for (std::int64_t c = 0; c < D; ++c) beacon.embed[c] = static_cast<T>(mean[c] / static_cast<double>(V));
}

template <typename T>
std::string hash_base(const BaseParams<T>& base) {
  return hash_tensors<BaseParams<T>, T>(base);
}

template <typename T>
std::string hash_beacon(const BeaconParams<T>& beacon) {
  return hash_tensors<BeaconParams<T>, T>(beacon);
}

template <typename To, typename From>
ModelParams<To> cast_params(const ModelParams<From>& src) {
  ModelParams<To> out;
  out.config = src.config;
  out.base.embed = tensor_cast<To>(src.base.embed);
  for (const auto& l : src.base.layers) {
    out.base.layers.push_back(LayerWeights<To>{
        tensor_cast<To>(l.attn_norm), tensor_cast<To>(l.wq), tensor_cast<To>(l.wk),
        tensor_cast<To>(l.wv), tensor_cast<To>(l.wo), tensor_cast<To>(l.mlp_norm),
        tensor_cast<To>(l.w_gate), tensor_cast<To>(l.w_up), tensor_cast<To>(l.w_down)});
  }
  out.base.final_norm = tensor_cast<To>(src.base.final_norm);
  out.base.lm_head = tensor_cast<To>(src.base.lm_head);
  for (const auto& l : src.beacon.layers) {
    out.beacon.layers.push_back(
        BeaconLayer<To>{tensor_cast<To>(l.wq), tensor_cast<To>(l.wk), tensor_cast<To>(l.wv)});
  }
  out.beacon.embed = tensor_cast<To>(src.beacon.embed);
  return out;
}

template <typename T>
std::int64_t count_parameters(const BaseParams<T>& base) {
  std::int64_t n = 0;
  for_each_tensor(base, ConstTensorVisitor<T>([&n](const std::string&, const Tensor<T>& t) { n += t.numel(); }));
  return n;
}

template <typename T>
std::int64_t count_parameters(const BeaconParams<T>& beacon) {
  std::int64_t n = 0;
  for_each_tensor(beacon, ConstTensorVisitor<T>([&n](const std::string&, const Tensor<T>& t) { n += t.numel(); }));
  return n;
}

#define BEACON_INSTANTIATE_PARAMS(T)                                                       \
  template void for_each_tensor<T>(BaseParams<T>&, const TensorVisitor<T>&);               \
  template void for_each_tensor<T>(const BaseParams<T>&, const ConstTensorVisitor<T>&);    \
  template void for_each_tensor<T>(BeaconParams<T>&, const TensorVisitor<T>&);             \
  template void for_each_tensor<T>(const BeaconParams<T>&, const ConstTensorVisitor<T>&);  \
  template ModelParams<T> init_params<T>(const ModelConfig&, std::uint64_t);               \
  template void reset_beacon_from_base<T>(ModelParams<T>&);                                \
  template std::string hash_base<T>(const BaseParams<T>&);                                 \
  template std::string hash_beacon<T>(const BeaconParams<T>&);                             \
  template std::int64_t count_parameters<T>(const BaseParams<T>&);                         \
  template std::int64_t count_parameters<T>(const BeaconParams<T>&);

BEACON_INSTANTIATE_PARAMS(float)
BEACON_INSTANTIATE_PARAMS(double)
template ModelParams<double> cast_params<double, float>(const ModelParams<float>&);
template ModelParams<float> cast_params<float, double>(const ModelParams<double>&);
template ModelParams<float> cast_params<float, float>(const ModelParams<float>&);
template ModelParams<double> cast_params<double, double>(const ModelParams<double>&);

}  // namespace beacon
