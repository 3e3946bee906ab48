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

#include "beacon/plan.hpp"

#include <string>

#include "beacon/errors.hpp"
#include "beacon/ratio_policy.hpp"

namespace beacon {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<ChunkBounds> partition(std::int64_t n, std::int64_t w) {
  if (n < 1 || w < 1) throw ConfigError("partition needs n >= 1 and w >= 1");
  std::vector<ChunkBounds> chunks;
  chunks.reserve(static_cast<std::size_t>((n + w - 1) / w));
  for (std::int64_t start = 0; start < n; start += w) chunks.push_back({start, std::min(start + w, n)});
  return chunks;
}

Interleaving interleave(std::int64_t chunk_len, int alpha, const ModelConfig& config) {
  if (!config.ratio_allowed(alpha)) {
    throw ConfigError("compression ratio " + std::to_string(alpha) + " is not in the ratio set");
  }
  if (chunk_len < 1 || chunk_len > config.chunk_size) {
    throw ConfigError("chunk length " + std::to_string(chunk_len) + " outside [1, chunk_size]");
  }
  Interleaving out;
  out.beacons = (chunk_len + alpha - 1) / alpha;
  out.kinds.reserve(static_cast<std::size_t>(chunk_len + out.beacons));
  if (config.placement == BeaconPlacement::kTrailing) {
    out.kinds.assign(static_cast<std::size_t>(chunk_len), TokenKind::kRaw);
    out.kinds.insert(out.kinds.end(), static_cast<std::size_t>(out.beacons), TokenKind::kBeacon);
    return out;
  }
  for (std::int64_t i = 0; i < chunk_len; ++i) {
    out.kinds.push_back(TokenKind::kRaw);
    if ((i + 1) % alpha == 0 || i + 1 == chunk_len) out.kinds.push_back(TokenKind::kBeacon);
  }
  return out;
}

std::int64_t ChunkPlan::total_beacons() const {
  std::int64_t total = 0;
  for (const auto& c : chunks) total += c.layout.beacons;
  return total;
}

std::vector<std::int32_t> interleaved_ids(std::span<const std::int32_t> chunk_tokens,
                                          const Interleaving& layout, std::int32_t beacon_token) {
  std::vector<std::int32_t> ids;
  ids.reserve(layout.kinds.size());
  std::size_t next = 0;
  for (TokenKind kind : layout.kinds) {
    if (kind == TokenKind::kBeacon) {
      ids.push_back(beacon_token);
    } else {
      if (next >= chunk_tokens.size()) throw DimensionError("layout has more raw slots than tokens");
      ids.push_back(chunk_tokens[next++]);
    }
  }
  if (next != chunk_tokens.size()) throw DimensionError("layout has fewer raw slots than tokens");
  return ids;
}

RatioPolicy RatioPolicy::constant(int alpha) {
  RatioPolicy p;
  p.mode_ = Mode::kConstant;
  p.ratios_ = {alpha};
  return p;
}

RatioPolicy RatioPolicy::explicit_list(std::vector<int> ratios) {
  if (ratios.empty()) throw ConfigError("explicit ratio list is empty");
  RatioPolicy p;
  p.mode_ = Mode::kExplicit;
  p.ratios_ = std::move(ratios);
  return p;
}

RatioPolicy RatioPolicy::random(std::vector<int> ratios, std::uint64_t seed) {
  if (ratios.empty()) throw ConfigError("random ratio list is empty");
  RatioPolicy p;
  p.mode_ = Mode::kRandom;
  p.ratios_ = std::move(ratios);
  p.seed_ = seed;
  return p;
}

RatioPolicy RatioPolicy::desk_adaptive() { return adaptive({{128, 2}, {256, 4}, {512, 8}}); }

RatioPolicy RatioPolicy::adaptive(std::vector<Rule> table) {
  if (table.empty()) throw ConfigError("adaptive ratio table is empty");
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].max_length <= table[i - 1].max_length) {
      throw ConfigError("adaptive ratio thresholds must be strictly increasing");
    }
  }
  RatioPolicy p;
  p.mode_ = Mode::kAdaptive;
  p.table_ = std::move(table);
  return p;
}

int RatioPolicy::ratio_for_chunk(std::size_t chunk_index, std::int64_t context_length) const {
  switch (mode_) {
    case Mode::kConstant:
      return ratios_.front();
    case Mode::kExplicit:
      return ratios_[std::min(chunk_index, ratios_.size() - 1)];
    case Mode::kAdaptive:
      for (const Rule& r : table_) {
        if (context_length <= r.max_length) return r.alpha;
      }
      return table_.back().alpha;
    case Mode::kRandom:
      return ratios_[splitmix64(seed_ ^ splitmix64(chunk_index)) % ratios_.size()];
  }
  return ratios_.front();
}

void RatioPolicy::validate(const ModelConfig& config) const {
  auto check = [&config](int alpha) {
    if (!config.ratio_allowed(alpha)) {
      throw ConfigError("compression ratio " + std::to_string(alpha) + " is not in the ratio set");
    }
  };
  for (int a : ratios_) check(a);
  for (const Rule& r : table_) check(r.alpha);
}

void to_json(nlohmann::json& j, const RatioPolicy& p) {
  switch (p.mode_) {
    case RatioPolicy::Mode::kConstant:
      j = {{"mode", "constant"}, {"alpha", p.ratios_.front()}};
      return;
    case RatioPolicy::Mode::kExplicit:
      j = {{"mode", "explicit"}, {"ratios", p.ratios_}};
      return;
    case RatioPolicy::Mode::kAdaptive: {
      nlohmann::json table = nlohmann::json::array();
      for (const auto& r : p.table_) table.push_back({{"max_length", r.max_length}, {"alpha", r.alpha}});
      j = {{"mode", "adaptive"}, {"table", table}};
      return;
    }
    case RatioPolicy::Mode::kRandom:
      j = {{"mode", "random"}, {"ratios", p.ratios_}, {"seed", p.seed_}};
      return;
  }
}

RatioPolicy policy_from_json(const nlohmann::json& j) {
  try {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "constant") return RatioPolicy::constant(j.at("alpha").get<int>());
    if (mode == "explicit") return RatioPolicy::explicit_list(j.at("ratios").get<std::vector<int>>());
    if (mode == "random") {
      return RatioPolicy::random(j.at("ratios").get<std::vector<int>>(), j.value("seed", std::uint64_t{0}));
    }
    if (mode == "adaptive") {
      std::vector<RatioPolicy::Rule> table;
      for (const auto& r : j.at("table")) {
        table.push_back({r.at("max_length").get<std::int64_t>(), r.at("alpha").get<int>()});
      }
      return RatioPolicy::adaptive(std::move(table));
    }
    throw ConfigError("unknown ratio policy mode '" + mode + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ratio policy: ") + e.what());
  }
}

ChunkPlan make_plan(std::int64_t n, const ModelConfig& config, const RatioPolicy& policy,
                    std::size_t first_chunk_index, std::int64_t context_length) {
  if (context_length < 0) context_length = n;
  ChunkPlan plan;
  const auto bounds = partition(n, config.chunk_size);
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const int alpha = policy.ratio_for_chunk(first_chunk_index + i, context_length);
    plan.chunks.push_back(ChunkLayout{bounds[i], alpha, interleave(bounds[i].size(), alpha, config)});
  }
  return plan;
}

}  // namespace beacon
