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
#include <random>
#include <vector>

#include "beacon/config.hpp"
#include "beacon/params.hpp"

namespace testutil {

inline beacon::ModelConfig tiny_config() {
  beacon::ModelConfig c;
  c.num_layers = 2;
  c.hidden_size = 16;
  c.query_heads = 4;
  c.kv_heads = 2;
  c.head_dim = 4;
  c.intermediate_size = 32;
  c.vocab_size = 32;
  c.chunk_size = 8;
  c.ratio_set = {2, 4, 8};
  return c;
}

// Moves the beacon weights away from their raw-path copies.
template <typename T>
void perturb_beacon(beacon::ModelParams<T>& p, std::uint64_t seed, double scale = 0.2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  beacon::for_each_tensor(p.beacon, beacon::TensorVisitor<T>([&](const std::string&, beacon::Tensor<T>& t) {
    for (auto& x : t.data) x += static_cast<T>(nd(rng));
  }));
}

inline std::vector<std::int32_t> random_tokens(std::size_t n, std::int64_t vocab, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int32_t> u(0, static_cast<std::int32_t>(vocab - 1));
  std::vector<std::int32_t> out(n);
  for (auto& t : out) t = u(rng);
  return out;
}

}  // namespace testutil
