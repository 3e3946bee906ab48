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
#include <filesystem>
#include <string>
#include <vector>

#include "beacon/config.hpp"
#include "beacon/container.hpp"
#include "beacon/tensor.hpp"

namespace beacon {

// Accumulated beacon activations of a compressed context. Keys and values
// are stored before rotary rotation; attention re-rotates them at condensed
// positions 0..m-1. No raw-token activation is ever stored here.
//
// A trailing partial chunk is compressed like any other, but its raw tokens
// are kept in pending_tokens and its beacons (the last pending_beacons rows)
// are provisional: a later append re-chunks pending_tokens together with the
// new tokens and replaces them. Rows from full chunks are append-only.
template <typename T>
struct CompressedCache {
  std::string config_hash;
  std::vector<Tensor<T>> keys;    // per layer, [m × kv_heads·head_dim]
  std::vector<Tensor<T>> values;  // per layer, [m × kv_heads·head_dim]
  std::int64_t m = 0;
  std::int64_t consumed_tokens = 0;
  std::size_t finalized_chunks = 0;
  std::vector<std::int32_t> pending_tokens;
  std::int64_t pending_beacons = 0;

  // Chunk encodes performed on this cache's lineage. Instrumentation only;
  // not part of equality and not persisted.
  std::uint64_t chunks_encoded = 0;

  bool operator==(const CompressedCache& o) const {
    return config_hash == o.config_hash && keys == o.keys && values == o.values && m == o.m &&
           consumed_tokens == o.consumed_tokens && finalized_chunks == o.finalized_chunks &&
           pending_tokens == o.pending_tokens && pending_beacons == o.pending_beacons;
  }

  std::int64_t entries_per_layer() const { return m; }
};

template <typename T>
CompressedCache<T> empty_cache(const ModelConfig& config);

// Snapshot = container with meta {"format": "beacon-cache", "config_hash",
// "m", "consumed_tokens", "finalized_chunks", "pending_tokens",
// "pending_beacons", "num_layers"} and tensors "cache.layers.<i>.k|v".
template <typename T>
Container cache_container(const CompressedCache<T>& cache);

template <typename T>
void save_cache_snapshot(const std::filesystem::path& path, const CompressedCache<T>& cache);

// Throws StateError when the snapshot was produced under a different config.
template <typename T>
CompressedCache<T> cache_from_container(const Container& c, const ModelConfig& expected);

template <typename T>
CompressedCache<T> load_cache_snapshot(const std::filesystem::path& path,
                                       const ModelConfig& expected);

}  // namespace beacon
