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

#include "beacon/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <memory>

#include "beacon/errors.hpp"

namespace beacon {

void ModelConfig::validate() const {
  auto positive = [](std::int64_t v, const char* name) {
    if (v <= 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(num_layers, "num_layers");
  positive(hidden_size, "hidden_size");
  positive(query_heads, "query_heads");
  positive(kv_heads, "kv_heads");
  positive(head_dim, "head_dim");
  positive(intermediate_size, "intermediate_size");
  positive(vocab_size, "vocab_size");
  positive(chunk_size, "chunk_size");
  if (hidden_size != query_heads * head_dim) {
    throw ConfigError("hidden_size must equal query_heads * head_dim");
  }
  if (query_heads % kv_heads != 0) throw ConfigError("query_heads must be divisible by kv_heads");
  if (head_dim % 2 != 0) throw ConfigError("head_dim must be even for rotary embedding");
  if (ratio_set.empty()) throw ConfigError("ratio_set is empty");
  for (int alpha : ratio_set) {
    if (alpha < 1) throw ConfigError("compression ratios must be >= 1");
    if (chunk_size % alpha != 0) {
      throw ConfigError("chunk_size " + std::to_string(chunk_size) +
                        " is not divisible by ratio " + std::to_string(alpha));
    }
  }
  if (!(rope_base > 0.0)) throw ConfigError("rope_base must be positive");
  if (!(norm_eps > 0.0)) throw ConfigError("norm_eps must be positive");
}

bool ModelConfig::ratio_allowed(int alpha) const {
  return std::find(ratio_set.begin(), ratio_set.end(), alpha) != ratio_set.end();
}

std::string ModelConfig::hash() const {
  nlohmann::json j = *this;
  return sha256_hex(j.dump());
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"num_layers", c.num_layers},
                     {"hidden_size", c.hidden_size},
                     {"query_heads", c.query_heads},
                     {"kv_heads", c.kv_heads},
                     {"head_dim", c.head_dim},
                     {"intermediate_size", c.intermediate_size},
                     {"vocab_size", c.vocab_size},
                     {"chunk_size", c.chunk_size},
                     {"ratio_set", c.ratio_set},
                     {"rope_base", c.rope_base},
                     {"norm_eps", c.norm_eps},
                     {"placement", c.placement == BeaconPlacement::kInterleaved ? "interleaved"
                                                                                  : "trailing"}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  // Missing keys keep their defaults so configs can list only overrides.
  ModelConfig d;
  c.num_layers = j.value("num_layers", d.num_layers);
  c.hidden_size = j.value("hidden_size", d.hidden_size);
  c.query_heads = j.value("query_heads", d.query_heads);
  c.kv_heads = j.value("kv_heads", d.kv_heads);
  c.head_dim = j.value("head_dim", d.head_dim);
  c.intermediate_size = j.value("intermediate_size", d.intermediate_size);
  c.vocab_size = j.value("vocab_size", d.vocab_size);
  c.chunk_size = j.value("chunk_size", d.chunk_size);
  c.ratio_set = j.value("ratio_set", d.ratio_set);
  c.rope_base = j.value("rope_base", d.rope_base);
  c.norm_eps = j.value("norm_eps", d.norm_eps);
  const std::string placement = j.value("placement", std::string("interleaved"));
  if (placement == "interleaved") {
    c.placement = BeaconPlacement::kInterleaved;
  } else if (placement == "trailing") {
    c.placement = BeaconPlacement::kTrailing;
  } else {
    throw ConfigError("unknown beacon placement '" + placement + "'");
  }
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw StateError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace beacon
