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

#include "beacon/compressor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "beacon/errors.hpp"
#include "beacon/ops.hpp"

namespace beacon {

namespace {

std::vector<std::int64_t> beacon_rows(std::span<const std::int32_t> ids, std::int32_t beacon) {
  std::vector<std::int64_t> rows;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == beacon) rows.push_back(static_cast<std::int64_t>(i));
  }
  return rows;
}

template <typename T>
void check_cache(const ModelConfig& config, const CompressedCache<T>& cache) {
  if (cache.config_hash != config.hash()) {
    throw StateError("cache was produced under a different model config");
  }
  if (static_cast<std::int64_t>(cache.keys.size()) != config.num_layers ||
      cache.values.size() != cache.keys.size()) {
    throw StateError("cache layer count differs from the model");
  }
  for (std::size_t l = 0; l < cache.keys.size(); ++l) {
    if (cache.keys[l].rows() != cache.m || cache.values[l].rows() != cache.m) {
      throw StateError("cache rows disagree with m at layer " + std::to_string(l));
    }
  }
}

template <typename T>
Tensor<T> take_rows(const Tensor<T>& x, std::int64_t rows) {
  const std::int64_t cols = x.cols();
  Tensor<T> out(Shape{rows, cols});
  std::copy_n(x.data.begin(), rows * cols, out.data.begin());
  return out;
}

template <typename T>
Tensor<T> stack_rows(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out(Shape{a.rows() + b.rows(), a.cols()});
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.numel()));
  return out;
}

}  // namespace

template <typename T>
Var encode_chunk_on_tape(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                         std::span<const std::int32_t> interleaved, TapeCache& cache) {
  ForwardResult fwd = forward_rows(tape, config, bound, interleaved, cache.keys, cache.values, cache.m);
  const auto rows = beacon_rows(interleaved, config.beacon_token());
  if (rows.empty()) return fwd.hidden;
  const bool first = cache.m == 0;
  cache.keys.resize(fwd.k.size());
  cache.values.resize(fwd.v.size());
  for (std::size_t l = 0; l < fwd.k.size(); ++l) {
    Var kb = ops::gather_rows(tape, fwd.k[l], rows);
    Var vb = ops::gather_rows(tape, fwd.v[l], rows);
    cache.keys[l] = first ? kb : ops::concat_rows(tape, {cache.keys[l], kb});
    cache.values[l] = first ? vb : ops::concat_rows(tape, {cache.values[l], vb});
  }
  cache.m += static_cast<std::int64_t>(rows.size());
  return fwd.hidden;
}

template <typename T>
Tensor<T> encode_and_accumulate(const ModelParams<T>& params, CompressedCache<T>& cache,
                                std::span<const std::int32_t> chunk_tokens,
                                const ChunkLayout& layout, const EncodeObserver<T>& observer) {
  const ModelConfig& config = params.config;
  check_cache(config, cache);
  if (static_cast<std::int64_t>(chunk_tokens.size()) != layout.bounds.size()) {
    throw StateError("chunk token count differs from its layout");
  }
  const auto ids = interleaved_ids(chunk_tokens, layout.layout, config.beacon_token());

  Tape<T> tape;
  const BoundParams bound = bind_params(tape, params, false, false);
  TapeCache tc;
  tc.m = cache.m;
  if (cache.m > 0) {
    for (std::size_t l = 0; l < cache.keys.size(); ++l) {
      tc.keys.push_back(tape.borrow(cache.keys[l]));
      tc.values.push_back(tape.borrow(cache.values[l]));
    }
  }
  if (observer) {
    for (std::size_t l = 0; l < cache.keys.size(); ++l) observer(l, cache.keys[l], cache.values[l]);
  }
  Var hidden = encode_chunk_on_tape(tape, config, bound, ids, tc);
  for (std::size_t l = 0; l < cache.keys.size(); ++l) {
    // Copies: the new tensors must not alias storage borrowed by the tape.
    Tensor<T> k = tape.value(tc.keys[l]);
    Tensor<T> v = tape.value(tc.values[l]);
    cache.keys[l] = std::move(k);
    cache.values[l] = std::move(v);
  }
  cache.m = tc.m;
  cache.consumed_tokens += static_cast<std::int64_t>(chunk_tokens.size());
  ++cache.chunks_encoded;
  return tape.value(hidden);
}

template <typename T>
CompressedCache<T> append_context(const ModelParams<T>& params, const CompressedCache<T>& cache,
                                  std::span<const std::int32_t> more, const RatioPolicy& policy) {
  const ModelConfig& config = params.config;
  check_cache(config, cache);
  policy.validate(config);
  if (more.empty()) return cache;

  CompressedCache<T> out = cache;
  std::vector<std::int32_t> tokens = out.pending_tokens;
  if (!tokens.empty()) {
    const std::int64_t keep = out.m - out.pending_beacons;
    for (std::size_t l = 0; l < out.keys.size(); ++l) {
      out.keys[l] = take_rows(out.keys[l], keep);
      out.values[l] = take_rows(out.values[l], keep);
    }
    out.m = keep;
    out.consumed_tokens -= static_cast<std::int64_t>(tokens.size());
    out.pending_tokens.clear();
    out.pending_beacons = 0;
  }
  tokens.insert(tokens.end(), more.begin(), more.end());

  const std::int64_t context_length = out.consumed_tokens + static_cast<std::int64_t>(tokens.size());
  const ChunkPlan plan = make_plan(static_cast<std::int64_t>(tokens.size()), config, policy,
                                   out.finalized_chunks, context_length);
  for (const ChunkLayout& chunk : plan.chunks) {
    const std::span<const std::int32_t> span(tokens.data() + chunk.bounds.start,
                                             static_cast<std::size_t>(chunk.bounds.size()));
    encode_and_accumulate(params, out, span, chunk);
    if (chunk.bounds.size() == config.chunk_size) {
      ++out.finalized_chunks;
    } else {
      out.pending_tokens.assign(span.begin(), span.end());
      out.pending_beacons = chunk.layout.beacons;
    }
  }
  return out;
}

template <typename T>
CompressedCache<T> compress_context(const ModelParams<T>& params,
                                    std::span<const std::int32_t> tokens,
                                    const RatioPolicy& policy) {
  if (tokens.empty()) throw UsageError("compress_context: empty context");
  return append_context(params, empty_cache<T>(params.config), tokens, policy);
}

template <typename T>
std::vector<std::int32_t> generate(const ModelParams<T>& params, const CompressedCache<T>& cache,
                                   std::span<const std::int32_t> prompt_tail, int max_new,
                                   const Sampling& sampling, const RatioPolicy& policy,
                                   GenerateStats* stats) {
  const ModelConfig& config = params.config;
  check_cache(config, cache);
  policy.validate(config);
  if (max_new <= 0) throw UsageError("generate: max_new must be positive");
  if (static_cast<std::int64_t>(prompt_tail.size()) >= config.chunk_size) {
    throw UsageError("generate: prompt tail must be shorter than the chunk size");
  }
  if (prompt_tail.empty()) throw UsageError("generate: no raw token to decode from");
  if (sampling.mode == Sampling::Mode::kTemperature && !(sampling.temperature > 0.0)) {
    throw ConfigError("generate: temperature must be positive");
  }
  for (std::int32_t t : prompt_tail) {
    if (t < 0 || t >= config.vocab_size) throw DataError("generate: token id out of range");
  }

  CompressedCache<T> work = cache;
  const std::uint64_t encoded_before = work.chunks_encoded;
  std::size_t next_chunk = work.finalized_chunks + (work.pending_tokens.empty() ? 0 : 1);
  std::vector<std::int32_t> tail;
  std::vector<Tensor<T>> tail_k(work.keys.size(), Tensor<T>(Shape{0, config.kv_width()}));
  std::vector<Tensor<T>> tail_v = tail_k;
  std::mt19937_64 rng(sampling.seed);

  std::vector<std::int32_t> feed(prompt_tail.begin(), prompt_tail.end());
  std::vector<std::int32_t> out;
  while (true) {
    Tape<T> tape;
    const BoundParams bound = bind_params(tape, params, false, false);
    std::vector<Tensor<T>> past_k, past_v;
    std::vector<Var> pk, pv;
    past_k.reserve(tail_k.size());
    past_v.reserve(tail_v.size());
    for (std::size_t l = 0; l < tail_k.size(); ++l) {
      past_k.push_back(stack_rows(work.keys[l], tail_k[l]));
      past_v.push_back(stack_rows(work.values[l], tail_v[l]));
    }
    for (std::size_t l = 0; l < tail_k.size(); ++l) {
      pk.push_back(tape.borrow(past_k[l]));
      pv.push_back(tape.borrow(past_v[l]));
    }
    const std::int64_t past_len = work.m + static_cast<std::int64_t>(tail.size());
    ForwardResult fwd = forward_rows(tape, config, bound, feed, pk, pv, past_len);
    for (std::size_t l = 0; l < tail_k.size(); ++l) {
      tail_k[l] = stack_rows(tail_k[l], tape.value(fwd.k[l]));
      tail_v[l] = stack_rows(tail_v[l], tape.value(fwd.v[l]));
    }
    tail.insert(tail.end(), feed.begin(), feed.end());

    const std::int64_t last = static_cast<std::int64_t>(feed.size()) - 1;
    Var row = ops::gather_rows(tape, fwd.hidden, std::vector<std::int64_t>{last});
    const Tensor<T>& logits = tape.value(lm_logits(tape, bound, row, config.norm_eps));

    std::int32_t next = 0;
    if (sampling.mode == Sampling::Mode::kGreedy) {
      next = static_cast<std::int32_t>(
          std::max_element(logits.data.begin(), logits.data.end()) - logits.data.begin());
    } else {
      const double top = static_cast<double>(*std::max_element(logits.data.begin(), logits.data.end()));
      std::vector<double> weights(logits.data.size());
      for (std::size_t i = 0; i < weights.size(); ++i) {
        weights[i] = std::exp((static_cast<double>(logits.data[i]) - top) / sampling.temperature);
      }
      std::discrete_distribution<std::int32_t> pick(weights.begin(), weights.end());
      next = pick(rng);
    }
    out.push_back(next);
    if (static_cast<int>(out.size()) == max_new) break;
    if (sampling.stop_token && next == *sampling.stop_token) break;

    if (static_cast<std::int64_t>(tail.size()) == config.chunk_size) {
      const std::int64_t context_length = work.consumed_tokens + config.chunk_size;
      const int alpha = policy.ratio_for_chunk(next_chunk++, context_length);
      const ChunkLayout layout{ChunkBounds{work.consumed_tokens, context_length}, alpha,
                               interleave(config.chunk_size, alpha, config)};
      encode_and_accumulate(params, work, tail, layout);
      tail.clear();
      for (auto& t : tail_k) t = Tensor<T>(Shape{0, config.kv_width()});
      for (auto& t : tail_v) t = Tensor<T>(Shape{0, config.kv_width()});
    }
    feed.assign(1, next);
  }
  if (stats) {
    stats->chunks_encoded = work.chunks_encoded - encoded_before;
    stats->final_m = work.m;
    stats->final_tail = static_cast<std::int64_t>(tail.size());
  }
  return out;
}

#define BEACON_INSTANTIATE_COMPRESSOR(T)                                                          \
  template Var encode_chunk_on_tape<T>(Tape<T>&, const ModelConfig&, const BoundParams&,          \
                                       std::span<const std::int32_t>, TapeCache&);                \
  template Tensor<T> encode_and_accumulate<T>(const ModelParams<T>&, CompressedCache<T>&,         \
                                              std::span<const std::int32_t>, const ChunkLayout&,  \
                                              const EncodeObserver<T>&);                          \
  template CompressedCache<T> append_context<T>(const ModelParams<T>&, const CompressedCache<T>&, \
                                                std::span<const std::int32_t>,                    \
                                                const RatioPolicy&);                              \
  template CompressedCache<T> compress_context<T>(const ModelParams<T>&,                          \
                                                  std::span<const std::int32_t>,                  \
                                                  const RatioPolicy&);                            \
  template std::vector<std::int32_t> generate<T>(const ModelParams<T>&, const CompressedCache<T>&, \
                                                 std::span<const std::int32_t>, int,              \
                                                 const Sampling&, const RatioPolicy&,             \
                                                 GenerateStats*);

BEACON_INSTANTIATE_COMPRESSOR(float)
BEACON_INSTANTIATE_COMPRESSOR(double)

}  // namespace beacon
