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

#include "beacon/checkpoint.hpp"

#include "beacon/errors.hpp"

namespace beacon {

template <typename T>
Container checkpoint_container(const ModelParams<T>& params, const nlohmann::json& extra_meta) {
  Container c;
  c.meta = extra_meta.is_object() ? extra_meta : nlohmann::json::object();
  c.meta["format"] = "beacon-checkpoint";
  c.meta["config"] = params.config;
  c.meta["config_hash"] = params.config.hash();
  c.meta["base_hash"] = hash_base(params.base);
  c.meta["beacon_hash"] = hash_beacon(params.beacon);
  auto add = [&c](const std::string& name, const Tensor<T>& t) { c.tensors.push_back(pack_tensor(name, t)); };
  for_each_tensor(params.base, ConstTensorVisitor<T>(add));
  for_each_tensor(params.beacon, ConstTensorVisitor<T>(add));
  return c;
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ModelParams<T>& params,
                     const nlohmann::json& extra_meta) {
  write_container(path, checkpoint_container(params, extra_meta));
}

template <typename T>
ModelParams<T> params_from_container(const Container& c) {
  if (c.meta.value("format", std::string()) != "beacon-checkpoint") {
    throw DataError("container is not a checkpoint");
  }
  ModelConfig config = c.meta.at("config").get<ModelConfig>();
  config.validate();
  // Allocate the right structure, then overwrite every tensor from the file.
  ModelParams<T> params;
  params.config = config;
  params.base.layers.resize(static_cast<std::size_t>(config.num_layers));
  params.beacon.layers.resize(static_cast<std::size_t>(config.num_layers));
  auto load = [&c](const std::string& name, Tensor<T>& t) { t = unpack_tensor<T>(c.find(name)); };
  for_each_tensor(params.base, TensorVisitor<T>(load));
  for_each_tensor(params.beacon, TensorVisitor<T>(load));
  return params;
}

template <typename T>
ModelParams<T> load_checkpoint(const std::filesystem::path& path) {
  return params_from_container<T>(read_container(path));
}

template Container checkpoint_container<float>(const ModelParams<float>&, const nlohmann::json&);
template Container checkpoint_container<double>(const ModelParams<double>&, const nlohmann::json&);
template void save_checkpoint<float>(const std::filesystem::path&, const ModelParams<float>&, const nlohmann::json&);
template void save_checkpoint<double>(const std::filesystem::path&, const ModelParams<double>&, const nlohmann::json&);
template ModelParams<float> params_from_container<float>(const Container&);
template ModelParams<double> params_from_container<double>(const Container&);
template ModelParams<float> load_checkpoint<float>(const std::filesystem::path&);
template ModelParams<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace beacon
