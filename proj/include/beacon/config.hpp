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
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace beacon {

enum class BeaconPlacement {
  kInterleaved,  // one beacon after every unit of alpha raw tokens
  kTrailing,     // all beacons of a chunk after its last raw token (ablation)
};

// Architecture and compression hyperparameters. Defaults are the desk-scale
// model: byte vocabulary, 4 layers, D=128, 4 query heads sharing 2 KV heads.
struct ModelConfig {
  std::int64_t num_layers = 4;
  std::int64_t hidden_size = 128;
  std::int64_t query_heads = 4;
  std::int64_t kv_heads = 2;
  std::int64_t head_dim = 32;
  std::int64_t intermediate_size = 512;
  std::int64_t vocab_size = 256;
  std::int64_t chunk_size = 64;
  std::vector<int> ratio_set = {2, 4, 8, 16, 32};
  double rope_base = 10000.0;
  double norm_eps = 1e-5;
  BeaconPlacement placement = BeaconPlacement::kInterleaved;

  // Throws ConfigError on any violated invariant.
  void validate() const;

  bool ratio_allowed(int alpha) const;

  // Beacons use the id one past the base vocabulary.
  std::int32_t beacon_token() const { return static_cast<std::int32_t>(vocab_size); }

  std::int64_t kv_width() const { return kv_heads * head_dim; }
  std::int64_t group_size() const { return query_heads / kv_heads; }

  // Hex SHA-256 of the canonical JSON form; caches record it.
  std::string hash() const;

  bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

std::string sha256_hex(std::string_view bytes);

}  // namespace beacon
