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
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace beacon {

// 128-bit unsigned counts; overflow throws std::overflow_error.
using Flops = boost::multiprecision::checked_uint128_t;

enum class SoftmaxCount {
  kLiteral,    // h^q · (s + s_pst)²
  kCorrected,  // h^q · s · (s + s_pst), one row per query
};

struct FlopsSpec {
  std::int64_t layers = 1;        // L
  std::int64_t hidden = 1;        // D
  std::int64_t query_heads = 1;   // h^q
  std::int64_t kv_heads = 1;      // h^k
  std::int64_t head_dim = 1;      // d
  std::int64_t intermediate = 1;  // I
  std::int64_t vocab = 1;         // V
  std::int64_t chunk_size = 1;    // w
  int alpha = 1;
  std::int64_t s = 0;      // input length
  std::int64_t s_pst = 0;  // cached length
  SoftmaxCount softmax = SoftmaxCount::kLiteral;

  // Throws ConfigError unless every size is positive and s, s_pst >= 0.
  void validate() const;
};

struct AttentionFlops {
  Flops qkv, qk, softmax, av, out;
  Flops total() const { return qkv + qk + softmax + av + out; }
};

struct OtherFlops {
  Flops up, gate, down, lm;
  Flops mlp() const { return up + gate + down; }
  Flops total() const { return mlp() + lm; }
};

// One layer's attention cost for spec.s queries over spec.s + spec.s_pst keys.
AttentionFlops f_att_terms(const FlopsSpec& spec);
Flops f_att(const FlopsSpec& spec);

// MLP and LM-head cost for spec.s rows.
OtherFlops f_oth_terms(const FlopsSpec& spec);
Flops f_oth(const FlopsSpec& spec);

// L · (attention(n, 0) + mlp(n)) + lm(n).
Flops flops_full(std::int64_t n, const FlopsSpec& spec);

// Chunk i of length l_i with k_i = ceil(l_i / alpha) beacons costs
// attention(l_i + k_i, k_0 + … + k_{i-1}) per layer; MLP and head run over
// n + Σk rows.
Flops flops_beacon(std::int64_t n, const FlopsSpec& spec);

struct KvEntries {
  std::int64_t full = 0;    // raw tokens cached without compression
  std::int64_t beacon = 0;  // accumulated beacons
};

// Per-layer cache entries for n compressed tokens. `ratio_set` is the set of
// admissible ratios (ConfigError when alpha is not in it).
KvEntries kv_cache_entries(std::int64_t n, std::int64_t w, int alpha,
                           const std::vector<int>& ratio_set = {2, 4, 8, 16, 32});

struct CurveRow {
  std::int64_t n = 0;
  Flops full;
  std::vector<Flops> beacon;   // one per ratio
  std::vector<double> ratio;   // full / beacon, one per ratio
};

// Lengths must be strictly ascending and positive.
std::vector<CurveRow> emit_curve(const FlopsSpec& spec, const std::vector<std::int64_t>& lengths,
                                 const std::vector<int>& ratios);

// Header "n,flops_full,flops_beacon_x<a>,ratio_x<a>,…" then one row per length.
void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows,
                     const std::vector<int>& ratios);

// Architecture presets: "llama2-7b", "qwen2-7b", "llama3-8b", "desk".
// Chunk size 1024 and ratio 8 except "desk" (64, 2).
FlopsSpec flops_preset(const std::string& name);
std::vector<std::string> flops_preset_names();

std::string to_string(const Flops& f);

}  // namespace beacon
