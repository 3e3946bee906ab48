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
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "beacon/plan.hpp"
#include "beacon/tape.hpp"
#include "beacon/tokenizer.hpp"
#include "beacon/transformer.hpp"

namespace beacon {

inline constexpr std::int32_t kIgnoreLabel = -100;

enum class RatioMode { kChunkWise, kInstanceWise };

// Seeded uniform draws from the ratio set: one per chunk, or one per example
// broadcast to all its chunks.
class RatioSchedule {
 public:
  RatioSchedule(std::vector<int> ratio_set, RatioMode mode, std::uint64_t seed);

  std::vector<int> sample(std::size_t num_chunks);

 private:
  std::vector<int> set_;
  RatioMode mode_;
  std::mt19937_64 rng_;
};

// Plan over n tokens with one given ratio per chunk.
ChunkPlan plan_with_ratios(std::int64_t n, const ModelConfig& config, std::span<const int> ratios);

// Labels over the concatenated interleaved sequence of `plan`. Raw slot t is
// labelled tokens[t + 1] (ignored when t is the last token); beacon slots and
// every slot of the first chunk are ignored.
std::vector<std::int32_t> build_labels(const ChunkPlan& plan, std::span<const std::int32_t> tokens);

struct LossResult {
  Var loss;               // mean NLL; a constant 0 when count == 0
  std::int64_t count = 0;  // labelled positions
};

// Compression-based autoregression over tokens[0..n-2] predicting
// tokens[1..n-1], chunk by chunk, with every chunk on the same tape.
// `ratios` holds one entry per chunk of n-1 input tokens.
template <typename T>
LossResult compression_ar_loss(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                               std::span<const std::int32_t> tokens, std::span<const int> ratios);

// Plain next-token loss with full causal attention and no beacons.
template <typename T>
LossResult vanilla_lm_loss(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                           std::span<const std::int32_t> tokens);

// "base" fits every base tensor with plain LM loss; "beacon" freezes the base
// and fits the beacon tensors with the compression loss.
enum class Phase { kBase, kBeacon };

struct OptimizerConfig {
  double lr = 1e-3;
  std::int64_t total_steps = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  double grad_clip = 0.0;  // global L2 norm; 0 disables
};

template <typename T>
struct OptState {
  Phase phase = Phase::kBeacon;
  OptimizerConfig config;
  std::vector<std::string> names;  // trained tensors, in visiting order
  std::vector<Tensor<T>> m, v;
  std::int64_t step = 0;

  // Linear decay to zero over total_steps, no warmup.
  double lr_at(std::int64_t s) const;
};

template <typename T>
OptState<T> make_optimizer(const ModelParams<T>& params, Phase phase, const OptimizerConfig& config);

struct StepMetrics {
  std::int64_t step = 0;   // 1-based index of the completed step
  double loss = 0.0;       // token-weighted mean over the batch
  double lr = 0.0;         // rate applied in this step
  std::int64_t tokens = 0;  // raw tokens processed in this step
  std::int64_t count = 0;   // labelled positions
  double grad_norm = 0.0;
};

// Gradient accumulation over single sequences, then one AdamW update of the
// phase's tensors. Batches with no labelled position leave parameters
// untouched but still advance the step. Throws NumericError on a non-finite
// loss.
template <typename T>
StepMetrics train_step(std::span<const TrainExample> batch, ModelParams<T>& params,
                       OptState<T>& opt, RatioSchedule& schedule);

// Token-weighted mean loss on the phase's objective, without an update.
template <typename T>
double evaluate_loss(std::span<const TrainExample> examples, const ModelParams<T>& params,
                     Phase phase, RatioSchedule& schedule);

struct TrainConfig {
  ModelConfig model;
  Phase phase = Phase::kBeacon;
  OptimizerConfig optimizer;
  std::int64_t batch_size = 1;
  std::uint64_t seed = 0;
  RatioMode ratio_mode = RatioMode::kChunkWise;
  std::int64_t min_len = 0;
  std::int64_t max_len = 1 << 20;
  std::string corpus;
  std::string mix_corpus;   // optional second corpus drawn with probability mix_fraction
  double mix_fraction = 0.0;
  std::string init_checkpoint;  // empty: fresh initialisation from seed
  bool reset_beacon = false;    // beacon phase: copy Q/K/V from the current base first
  std::string output_checkpoint = "checkpoint.bin";
  std::string metrics = "metrics.jsonl";
  std::int64_t log_every = 1;

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
TrainConfig load_train_config(const std::filesystem::path& path);

struct TrainSummary {
  std::int64_t steps = 0;
  double first_loss = 0.0;
  double last_loss = 0.0;
  std::string base_hash_before, base_hash_after;
  std::string beacon_hash_after;
};

using StepCallback = std::function<void(const StepMetrics&)>;

// Runs the configured number of steps over `corpus` (and `mix` when
// mix_fraction > 0). Metrics lines {step, loss, lr, tokens_seen} go to
// config.metrics, which is truncated first.
TrainSummary run_training(const TrainConfig& config, ModelParams<float>& params,
                          const std::vector<TrainExample>& corpus,
                          const std::vector<TrainExample>& mix, const StepCallback& on_step = {});

// Loads the corpora named by the config (filtered by min_len/max_len),
// starts from init_checkpoint or a fresh seeded init, then trains.
TrainSummary train_from_config(const TrainConfig& config, const StepCallback& on_step = {});

}  // namespace beacon
