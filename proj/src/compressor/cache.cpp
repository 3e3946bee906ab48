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

#include "beacon/cache.hpp"

#include "beacon/errors.hpp"

namespace beacon {

template <typename T>
CompressedCache<T> empty_cache(const ModelConfig& config) {
  config.validate();
  CompressedCache<T> c;
  c.config_hash = config.hash();
  for (std::int64_t l = 0; l < config.num_layers; ++l) {
    c.keys.emplace_back(Shape{0, config.kv_width()});
    c.values.emplace_back(Shape{0, config.kv_width()});
  }
  return c;
}

template <typename T>
Container cache_container(const CompressedCache<T>& cache) {
  Container c;
  c.meta = {{"format", "beacon-cache"},
            {"config_hash", cache.config_hash},
            {"m", cache.m},
            {"consumed_tokens", cache.consumed_tokens},
            {"finalized_chunks", cache.finalized_chunks},
            {"pending_tokens", cache.pending_tokens},
            {"pending_beacons", cache.pending_beacons},
            {"num_layers", cache.keys.size()}};
  for (std::size_t l = 0; l < cache.keys.size(); ++l) {
    const std::string p = "cache.layers." + std::to_string(l) + ".";
    c.tensors.push_back(pack_tensor(p + "k", cache.keys[l]));
    c.tensors.push_back(pack_tensor(p + "v", cache.values[l]));
  }
  return c;
}

template <typename T>
void save_cache_snapshot(const std::filesystem::path& path, const CompressedCache<T>& cache) {
  write_container(path, cache_container(cache));
}

template <typename T>
CompressedCache<T> cache_from_container(const Container& c, const ModelConfig& expected) {
  if (c.meta.value("format", std::string()) != "beacon-cache") {
    throw DataError("container is not a cache snapshot");
  }
  const std::string hash = c.meta.at("config_hash").get<std::string>();
  if (hash != expected.hash()) {
    throw StateError("cache snapshot was produced under a different model config (" + hash +
                     " vs " + expected.hash() + ")");
  }
  CompressedCache<T> cache;
  cache.config_hash = hash;
  cache.m = c.meta.at("m").get<std::int64_t>();
  cache.consumed_tokens = c.meta.at("consumed_tokens").get<std::int64_t>();
  cache.finalized_chunks = c.meta.at("finalized_chunks").get<std::size_t>();
  cache.pending_tokens = c.meta.at("pending_tokens").get<std::vector<std::int32_t>>();
  cache.pending_beacons = c.meta.at("pending_beacons").get<std::int64_t>();
  const auto layers = c.meta.at("num_layers").get<std::size_t>();
  if (static_cast<std::int64_t>(layers) != expected.num_layers) {
    throw StateError("cache snapshot layer count differs from the model");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string p = "cache.layers." + std::to_string(l) + ".";
    cache.keys.push_back(unpack_tensor<T>(c.find(p + "k")));
    cache.values.push_back(unpack_tensor<T>(c.find(p + "v")));
    if (cache.keys.back().rows() != cache.m || cache.values.back().rows() != cache.m) {
      throw DataError("cache snapshot tensor rows disagree with m");
    }
  }
  return cache;
}

template <typename T>
CompressedCache<T> load_cache_snapshot(const std::filesystem::path& path,
                                       const ModelConfig& expected) {
  return cache_from_container<T>(read_container(path), expected);
}

template CompressedCache<float> empty_cache<float>(const ModelConfig&);
template CompressedCache<double> empty_cache<double>(const ModelConfig&);
template Container cache_container<float>(const CompressedCache<float>&);
template Container cache_container<double>(const CompressedCache<double>&);
template void save_cache_snapshot<float>(const std::filesystem::path&, const CompressedCache<float>&);
template void save_cache_snapshot<double>(const std::filesystem::path&, const CompressedCache<double>&);
template CompressedCache<float> cache_from_container<float>(const Container&, const ModelConfig&);
template CompressedCache<double> cache_from_container<double>(const Container&, const ModelConfig&);
template CompressedCache<float> load_cache_snapshot<float>(const std::filesystem::path&, const ModelConfig&);
template CompressedCache<double> load_cache_snapshot<double>(const std::filesystem::path&, const ModelConfig&);

}  // namespace beacon
