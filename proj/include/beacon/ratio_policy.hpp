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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "beacon/plan.hpp"
#include "json.hpp"

namespace beacon {

// Chooses alpha per chunk. Constant uses one ratio everywhere; explicit
// takes a per-chunk list (repeating its last entry); adaptive looks the
// context length up in a table and never reads content; random draws each
// chunk's ratio from a list with a hash of (seed, chunk index).
class RatioPolicy {
 public:
  struct Rule {
    std::int64_t max_length;  // inclusive upper bound of context length
    int alpha;
  };

  static RatioPolicy constant(int alpha);
  static RatioPolicy explicit_list(std::vector<int> ratios);
  // Rules sorted by strictly increasing max_length; contexts longer than the
  // last threshold use the last rule's ratio.
  static RatioPolicy adaptive(std::vector<Rule> table);
  static RatioPolicy random(std::vector<int> ratios, std::uint64_t seed);

  // Desk-scale table: x2 up to 128 tokens, x4 up to 256, x8 beyond.
  static RatioPolicy desk_adaptive();

  int ratio_for_chunk(std::size_t chunk_index, std::int64_t context_length) const;

  // Validates every ratio the policy can return against the config.
  void validate(const ModelConfig& config) const;

 private:
  enum class Mode { kConstant, kExplicit, kAdaptive, kRandom };
  Mode mode_ = Mode::kConstant;
  std::vector<int> ratios_;
  std::vector<Rule> table_;
  std::uint64_t seed_ = 0;

  friend void to_json(nlohmann::json& j, const RatioPolicy& p);
};

// {"mode": "constant", "alpha": 8}
// {"mode": "explicit", "ratios": [2, 4, 8]}
// {"mode": "adaptive", "table": [{"max_length": 128, "alpha": 2}, ...]}
// {"mode": "random", "ratios": [2, 4, 8], "seed": 0}
void to_json(nlohmann::json& j, const RatioPolicy& p);
RatioPolicy policy_from_json(const nlohmann::json& j);

// Plans chunks for n tokens. Chunk i of this plan is global chunk
// first_chunk_index + i when continuing an earlier session.
ChunkPlan make_plan(std::int64_t n, const ModelConfig& config, const RatioPolicy& policy,
                    std::size_t first_chunk_index = 0, std::int64_t context_length = -1);

}  // namespace beacon
