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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "beacon/cache.hpp"
#include "beacon/ratio_policy.hpp"
#include "beacon/transformer.hpp"

namespace beacon {

// Beacon activations accumulated on a tape, for training through every chunk.
struct TapeCache {
  std::vector<Var> keys, values;  // per layer; empty while m == 0
  std::int64_t m = 0;
};

// Runs one interleaved chunk over the cache and appends its beacon rows.
// Returns the last layer's hidden states for every row of the chunk.
template <typename T>
Var encode_chunk_on_tape(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                         std::span<const std::int32_t> interleaved, TapeCache& cache);

// Sees the accumulated keys/values a chunk is about to attend to, per layer.
template <typename T>
using EncodeObserver =
    std::function<void(std::size_t layer, const Tensor<T>& past_k, const Tensor<T>& past_v)>;

// Encodes one chunk of raw tokens laid out per `layout` and appends its beacon
// activations to `cache`. Raw-row activations are dropped. Does not touch the
// pending bookkeeping; see append_context.
template <typename T>
Tensor<T> encode_and_accumulate(const ModelParams<T>& params, CompressedCache<T>& cache,
                                std::span<const std::int32_t> chunk_tokens,
                                const ChunkLayout& layout,
                                const EncodeObserver<T>& observer = {});

// Continues compression from `cache`. A trailing partial chunk left by the
// previous turn is rolled back and re-chunked together with `more`, so
// append_context(compress_context(a), b) equals compress_context(a ++ b)
// under any policy that does not depend on total length.
template <typename T>
CompressedCache<T> append_context(const ModelParams<T>& params, const CompressedCache<T>& cache,
                                  std::span<const std::int32_t> more, const RatioPolicy& policy);

template <typename T>
CompressedCache<T> compress_context(const ModelParams<T>& params,
                                    std::span<const std::int32_t> tokens,
                                    const RatioPolicy& policy);

struct Sampling {
  enum class Mode { kGreedy, kTemperature };
  Mode mode = Mode::kGreedy;
  double temperature = 1.0;
  std::uint64_t seed = 0;
  std::optional<std::int32_t> stop_token;  // included in the output, ends decoding
};

struct GenerateStats {
  std::uint64_t chunks_encoded = 0;  // tail chunks compressed while decoding
  std::int64_t final_m = 0;
  std::int64_t final_tail = 0;
};

// Decodes from the compressed cache plus a raw local tail. The tail is
// compressed as a chunk once it holds chunk_size tokens. `cache` is not
// modified.
template <typename T>
std::vector<std::int32_t> generate(const ModelParams<T>& params, const CompressedCache<T>& cache,
                                   std::span<const std::int32_t> prompt_tail, int max_new,
                                   const Sampling& sampling, const RatioPolicy& policy,
                                   GenerateStats* stats = nullptr);

}  // namespace beacon
