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

#include "beacon/config.hpp"
#include "beacon/transformer.hpp"

namespace beacon {

struct ChunkBounds {
  std::int64_t start = 0;
  std::int64_t end = 0;  // exclusive

  std::int64_t size() const { return end - start; }
  bool operator==(const ChunkBounds&) const = default;
};

// ceil(n / w) contiguous chunks; all of length w except possibly the last.
std::vector<ChunkBounds> partition(std::int64_t n, std::int64_t w);

struct Interleaving {
  TokenKindMask kinds;  // over raw + beacon slots
  std::int64_t beacons = 0;
};

// Units of alpha raw tokens, each closed by one beacon; a short final unit
// gets a beacon too, so beacons = ceil(chunk_len / alpha). With trailing
// placement the same number of beacons follows the last raw token.
Interleaving interleave(std::int64_t chunk_len, int alpha, const ModelConfig& config);

struct ChunkLayout {
  ChunkBounds bounds;
  int alpha = 0;
  Interleaving layout;
};

struct ChunkPlan {
  std::vector<ChunkLayout> chunks;

  std::int64_t total_beacons() const;
};

// Raw ids of one chunk with beacon sentinels inserted per its layout.
std::vector<std::int32_t> interleaved_ids(std::span<const std::int32_t> chunk_tokens,
                                          const Interleaving& layout, std::int32_t beacon_token);

}  // namespace beacon
