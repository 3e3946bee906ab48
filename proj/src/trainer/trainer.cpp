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

#include "beacon/trainer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "beacon/checkpoint.hpp"
#include "beacon/compressor.hpp"
#include "beacon/errors.hpp"
#include "beacon/ops.hpp"

namespace beacon {

RatioSchedule::RatioSchedule(std::vector<int> ratio_set, RatioMode mode, std::uint64_t seed)
    : set_(std::move(ratio_set)), mode_(mode), rng_(seed) {
  if (set_.empty()) throw ConfigError("ratio schedule needs a non-empty ratio set");
}

std::vector<int> RatioSchedule::sample(std::size_t num_chunks) {
  if (num_chunks == 0) throw UsageError("sample_ratios needs at least one chunk");
  std::uniform_int_distribution<std::size_t> pick(0, set_.size() - 1);
  std::vector<int> out(num_chunks);
  if (mode_ == RatioMode::kInstanceWise) {
    std::fill(out.begin(), out.end(), set_[pick(rng_)]);
  } else {
    for (int& a : out) a = set_[pick(rng_)];
  }
  return out;
}

ChunkPlan plan_with_ratios(std::int64_t n, const ModelConfig& config, std::span<const int> ratios) {
  const auto bounds = partition(n, config.chunk_size);
  if (bounds.size() != ratios.size()) {
    throw UsageError("expected " + std::to_string(bounds.size()) + " ratios, got " +
                     std::to_string(ratios.size()));
  }
  ChunkPlan plan;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    plan.chunks.push_back(
        ChunkLayout{bounds[i], ratios[i], interleave(bounds[i].size(), ratios[i], config)});
  }
  return plan;
}

std::vector<std::int32_t> build_labels(const ChunkPlan& plan, std::span<const std::int32_t> tokens) {
  std::vector<std::int32_t> labels;
  for (std::size_t c = 0; c < plan.chunks.size(); ++c) {
    const ChunkLayout& ch = plan.chunks[c];
    if (ch.bounds.end > static_cast<std::int64_t>(tokens.size())) {
      throw UsageError("plan extends past the token sequence");
    }
    std::int64_t t = ch.bounds.start;
    for (TokenKind kind : ch.layout.kinds) {
      if (kind == TokenKind::kBeacon) {
        labels.push_back(kIgnoreLabel);
        continue;
      }
      const bool labelled = c > 0 && t + 1 < static_cast<std::int64_t>(tokens.size());
      labels.push_back(labelled ? tokens[static_cast<std::size_t>(t + 1)] : kIgnoreLabel);
      ++t;
    }
  }
  return labels;
}

template <typename T>
LossResult compression_ar_loss(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                               std::span<const std::int32_t> tokens, std::span<const int> ratios) {
  const auto n = static_cast<std::int64_t>(tokens.size());
  if (n < 2) return {tape.leaf(Tensor<T>::scalar(T{0})), 0};
  const ChunkPlan plan = plan_with_ratios(n - 1, config, ratios);
  const std::vector<std::int32_t> labels = build_labels(plan, tokens);

  TapeCache cache;
  std::vector<Var> picked;
  std::vector<std::int32_t> targets;
  std::size_t offset = 0;
  for (std::size_t c = 0; c < plan.chunks.size(); ++c) {
    const ChunkLayout& ch = plan.chunks[c];
    const auto raw = tokens.subspan(static_cast<std::size_t>(ch.bounds.start),
                                    static_cast<std::size_t>(ch.bounds.size()));
    const auto ids = interleaved_ids(raw, ch.layout, config.beacon_token());
    Var hidden = encode_chunk_on_tape(tape, config, bound, ids, cache);
    std::vector<std::int64_t> rows;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (labels[offset + j] == kIgnoreLabel) continue;
      rows.push_back(static_cast<std::int64_t>(j));
      targets.push_back(labels[offset + j]);
    }
    if (!rows.empty()) picked.push_back(ops::gather_rows(tape, hidden, rows));
    offset += ids.size();
  }
  if (targets.empty()) return {tape.leaf(Tensor<T>::scalar(T{0})), 0};
  Var h = picked.size() == 1 ? picked.front() : ops::concat_rows(tape, picked);
  const ops::CrossEntropy ce =
      ops::cross_entropy(tape, lm_logits(tape, bound, h, config.norm_eps), targets, kIgnoreLabel);
  return {ce.loss, ce.count};
}

template <typename T>
LossResult vanilla_lm_loss(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                           std::span<const std::int32_t> tokens) {
  if (tokens.size() < 2) return {tape.leaf(Tensor<T>::scalar(T{0})), 0};
  const auto input = tokens.first(tokens.size() - 1);
  ForwardResult f = forward_rows(tape, config, bound, input, {}, {}, 0);
  const ops::CrossEntropy ce = ops::cross_entropy(
      tape, lm_logits(tape, bound, f.hidden, config.norm_eps), tokens.subspan(1), kIgnoreLabel);
  return {ce.loss, ce.count};
}

namespace {

std::vector<Var> trained_vars(const BoundParams& b, Phase phase) {
  std::vector<Var> out;
  if (phase == Phase::kBase) {
    out.push_back(b.embed);
    for (const BoundLayer& l : b.layers) {
      for (Var v : {l.attn_norm, l.wq, l.wk, l.wv, l.wo, l.mlp_norm, l.w_gate, l.w_up, l.w_down}) {
        out.push_back(v);
      }
    }
    out.push_back(b.final_norm);
    out.push_back(b.lm_head);
  } else {
    out.push_back(b.beacon_embed);
    for (const BoundLayer& l : b.layers) {
      for (Var v : {l.beacon_wq, l.beacon_wk, l.beacon_wv}) out.push_back(v);
    }
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>*> trained_tensors(ModelParams<T>& params, Phase phase) {
  std::vector<Tensor<T>*> out;
  const TensorVisitor<T> visit = [&](const std::string&, Tensor<T>& t) { out.push_back(&t); };
  if (phase == Phase::kBase) {
    for_each_tensor(params.base, visit);
  } else {
    for_each_tensor(params.beacon, visit);
  }
  return out;
}

template <typename T>
LossResult phase_loss(Tape<T>& tape, const ModelConfig& config, const BoundParams& bound,
                      std::span<const std::int32_t> tokens, Phase phase, RatioSchedule& schedule) {
  if (phase == Phase::kBase) return vanilla_lm_loss(tape, config, bound, tokens);
  if (tokens.size() < 2) return {tape.leaf(Tensor<T>::scalar(T{0})), 0};
  const auto chunks = partition(static_cast<std::int64_t>(tokens.size()) - 1, config.chunk_size).size();
  const std::vector<int> ratios = schedule.sample(chunks);
  return compression_ar_loss(tape, config, bound, tokens, ratios);
}

}  // namespace

template <typename T>
double OptState<T>::lr_at(std::int64_t s) const {
  if (config.total_steps <= 0) return 0.0;
  const double frac = 1.0 - static_cast<double>(s) / static_cast<double>(config.total_steps);
  return config.lr * std::max(0.0, frac);
}

template <typename T>
OptState<T> make_optimizer(const ModelParams<T>& params, Phase phase, const OptimizerConfig& config) {
  if (!(config.lr >= 0.0) || config.total_steps < 1 || !(config.beta1 >= 0.0 && config.beta1 < 1.0) ||
      !(config.beta2 >= 0.0 && config.beta2 < 1.0) || !(config.eps > 0.0) ||
      !(config.weight_decay >= 0.0) || !(config.grad_clip >= 0.0)) {
    throw ConfigError("invalid optimizer settings");
  }
  OptState<T> opt;
  opt.phase = phase;
  opt.config = config;
  const ConstTensorVisitor<T> visit = [&](const std::string& name, const Tensor<T>& t) {
    opt.names.push_back(name);
    opt.m.emplace_back(t.shape);
    opt.v.emplace_back(t.shape);
  };
  if (phase == Phase::kBase) {
    for_each_tensor(params.base, visit);
  } else {
    for_each_tensor(params.beacon, visit);
  }
  return opt;
}

template <typename T>
StepMetrics train_step(std::span<const TrainExample> batch, ModelParams<T>& params,
                       OptState<T>& opt, RatioSchedule& schedule) {
  const ModelConfig& config = params.config;
  std::vector<Tensor<T>*> targets = trained_tensors(params, opt.phase);
  if (targets.size() != opt.names.size()) throw StateError("optimizer does not match the parameters");

  StepMetrics metrics;
  metrics.lr = opt.lr_at(opt.step);
  std::vector<std::vector<double>> acc(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) acc[k].assign(targets[k]->data.size(), 0.0);
  double loss_sum = 0.0;

  for (std::size_t e = 0; e < batch.size(); ++e) {
    const auto& tokens = batch[e].tokens;
    metrics.tokens += static_cast<std::int64_t>(tokens.size());
    Tape<T> tape;
    const BoundParams bound =
        bind_params(tape, params, opt.phase == Phase::kBase, opt.phase == Phase::kBeacon);
    const LossResult r = phase_loss(tape, config, bound, std::span<const std::int32_t>(tokens),
                                    opt.phase, schedule);
    if (r.count == 0) continue;
    const double value = static_cast<double>(tape.value(r.loss).data[0]);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "non-finite loss " << value << " at step " << opt.step + 1 << ", batch item " << e
          << " (" << tokens.size() << " tokens, lr " << metrics.lr << ")";
      throw NumericError(msg.str());
    }
    tape.backward(r.loss);
    const std::vector<Var> vars = trained_vars(bound, opt.phase);
    const double w = static_cast<double>(r.count);
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const auto& g = tape.grad(vars[k]).data;
      for (std::size_t i = 0; i < g.size(); ++i) acc[k][i] += w * static_cast<double>(g[i]);
    }
    loss_sum += w * value;
    metrics.count += r.count;
  }

  ++opt.step;
  metrics.step = opt.step;
  if (metrics.count == 0) return metrics;
  metrics.loss = loss_sum / static_cast<double>(metrics.count);

  double norm2 = 0.0;
  for (auto& a : acc) {
    for (double& g : a) {
      g /= static_cast<double>(metrics.count);
      norm2 += g * g;
    }
  }
  metrics.grad_norm = std::sqrt(norm2);
  if (!std::isfinite(metrics.grad_norm)) {
    throw NumericError("non-finite gradient norm at step " + std::to_string(opt.step));
  }
  double clip = 1.0;
  if (opt.config.grad_clip > 0.0 && metrics.grad_norm > opt.config.grad_clip) {
    clip = opt.config.grad_clip / metrics.grad_norm;
  }

  const OptimizerConfig& c = opt.config;
  const double t = static_cast<double>(opt.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    auto& p = targets[k]->data;
    auto& m = opt.m[k].data;
    auto& v = opt.v[k].data;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = acc[k][i] * clip;
      const double mi = c.beta1 * static_cast<double>(m[i]) + (1.0 - c.beta1) * g;
      const double vi = c.beta2 * static_cast<double>(v[i]) + (1.0 - c.beta2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double pi = static_cast<double>(p[i]);
      const double update = (mi / bc1) / (std::sqrt(vi / bc2) + c.eps) + c.weight_decay * pi;
      p[i] = static_cast<T>(pi - metrics.lr * update);
    }
  }
  return metrics;
}

template <typename T>
double evaluate_loss(std::span<const TrainExample> examples, const ModelParams<T>& params,
                     Phase phase, RatioSchedule& schedule) {
  double sum = 0.0;
  std::int64_t count = 0;
  for (const TrainExample& ex : examples) {
    Tape<T> tape;
    const BoundParams bound = bind_params(tape, params, false, false);
    const LossResult r = phase_loss(tape, params.config, bound,
                                    std::span<const std::int32_t>(ex.tokens), phase, schedule);
    if (r.count == 0) continue;
    sum += static_cast<double>(tape.value(r.loss).data[0]) * static_cast<double>(r.count);
    count += r.count;
  }
  if (count == 0) throw DataError("no labelled positions to evaluate");
  return sum / static_cast<double>(count);
}

void TrainConfig::validate() const {
  model.validate();
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (log_every < 1) throw ConfigError("log_every must be >= 1");
  if (min_len < 0 || max_len < min_len) throw ConfigError("filter needs 0 <= min_len <= max_len");
  if (!(mix_fraction >= 0.0 && mix_fraction <= 1.0)) throw ConfigError("mix_fraction must lie in [0, 1]");
  if (mix_fraction > 0.0 && mix_corpus.empty()) throw ConfigError("mix_fraction set without mix_corpus");
  if (optimizer.total_steps < 1) throw ConfigError("total_steps must be >= 1");
  if (!(optimizer.lr >= 0.0)) throw ConfigError("lr must be non-negative");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"model", c.model},
       {"phase", c.phase == Phase::kBase ? "base" : "beacon"},
       {"lr", c.optimizer.lr},
       {"total_steps", c.optimizer.total_steps},
       {"beta1", c.optimizer.beta1},
       {"beta2", c.optimizer.beta2},
       {"adam_eps", c.optimizer.eps},
       {"weight_decay", c.optimizer.weight_decay},
       {"grad_clip", c.optimizer.grad_clip},
       {"batch_size", c.batch_size},
       {"seed", c.seed},
       {"ratio_mode", c.ratio_mode == RatioMode::kChunkWise ? "chunk" : "instance"},
       {"filter", {{"min_len", c.min_len}, {"max_len", c.max_len}}},
       {"corpus", c.corpus},
       {"mix_corpus", c.mix_corpus},
       {"mix_fraction", c.mix_fraction},
       {"init_checkpoint", c.init_checkpoint},
       {"reset_beacon", c.reset_beacon},
       {"output_checkpoint", c.output_checkpoint},
       {"metrics", c.metrics},
       {"log_every", c.log_every}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  const TrainConfig d;
  c.model = j.value("model", d.model);
  const std::string phase = j.value("phase", std::string("beacon"));
  if (phase == "base") {
    c.phase = Phase::kBase;
  } else if (phase == "beacon") {
    c.phase = Phase::kBeacon;
  } else {
    throw ConfigError("phase must be \"base\" or \"beacon\", got \"" + phase + "\"");
  }
  c.optimizer.lr = j.value("lr", d.optimizer.lr);
  c.optimizer.total_steps = j.value("total_steps", d.optimizer.total_steps);
  c.optimizer.beta1 = j.value("beta1", d.optimizer.beta1);
  c.optimizer.beta2 = j.value("beta2", d.optimizer.beta2);
  c.optimizer.eps = j.value("adam_eps", d.optimizer.eps);
  c.optimizer.weight_decay = j.value("weight_decay", d.optimizer.weight_decay);
  c.optimizer.grad_clip = j.value("grad_clip", d.optimizer.grad_clip);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.seed = j.value("seed", d.seed);
  const std::string mode = j.value("ratio_mode", std::string("chunk"));
  if (mode == "chunk") {
    c.ratio_mode = RatioMode::kChunkWise;
  } else if (mode == "instance") {
    c.ratio_mode = RatioMode::kInstanceWise;
  } else {
    throw ConfigError("ratio_mode must be \"chunk\" or \"instance\", got \"" + mode + "\"");
  }
  const nlohmann::json filter = j.value("filter", nlohmann::json::object());
  c.min_len = filter.value("min_len", d.min_len);
  c.max_len = filter.value("max_len", d.max_len);
  c.corpus = j.value("corpus", d.corpus);
  c.mix_corpus = j.value("mix_corpus", d.mix_corpus);
  c.mix_fraction = j.value("mix_fraction", d.mix_fraction);
  c.init_checkpoint = j.value("init_checkpoint", d.init_checkpoint);
  c.reset_beacon = j.value("reset_beacon", d.reset_beacon);
  c.output_checkpoint = j.value("output_checkpoint", d.output_checkpoint);
  c.metrics = j.value("metrics", d.metrics);
  c.log_every = j.value("log_every", d.log_every);
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read train config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("train config " + path.string() + ": " + e.what());
  }
  TrainConfig c;
  try {
    c = j.get<TrainConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("train config " + path.string() + ": " + e.what());
  }
  // Relative paths are taken relative to the config file.
  const auto base = path.parent_path();
  for (std::string* p : {&c.corpus, &c.mix_corpus, &c.init_checkpoint, &c.output_checkpoint, &c.metrics}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).string();
  }
  c.validate();
  return c;
}

TrainSummary run_training(const TrainConfig& config, ModelParams<float>& params,
                          const std::vector<TrainExample>& corpus,
                          const std::vector<TrainExample>& mix, const StepCallback& on_step) {
  config.validate();
  if (!(params.config == config.model)) throw ConfigError("parameters do not match the model config");
  if (corpus.empty()) throw DataError("training corpus is empty");
  if (config.mix_fraction > 0.0 && mix.empty()) throw DataError("mix corpus is empty");

  if (config.reset_beacon && config.phase == Phase::kBeacon) reset_beacon_from_base(params);
  OptState<float> opt = make_optimizer(params, config.phase, config.optimizer);
  RatioSchedule schedule(config.model.ratio_set, config.ratio_mode, config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::size_t> order(corpus.size());
  std::size_t cursor = order.size();
  auto next_example = [&]() -> const TrainExample& {
    if (cursor == order.size()) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
      cursor = 0;
    }
    return corpus[order[cursor++]];
  };

  std::ofstream metrics;
  if (!config.metrics.empty()) {
    metrics.open(config.metrics, std::ios::trunc);
    if (!metrics) throw DataError("cannot write metrics to " + config.metrics);
  }

  TrainSummary summary;
  summary.base_hash_before = hash_base(params.base);
  std::int64_t tokens_seen = 0;
  std::vector<TrainExample> batch;
  for (std::int64_t s = 0; s < config.optimizer.total_steps; ++s) {
    batch.clear();
    for (std::int64_t b = 0; b < config.batch_size; ++b) {
      if (config.mix_fraction > 0.0 && coin(rng) < config.mix_fraction) {
        batch.push_back(mix[rng() % mix.size()]);
      } else {
        batch.push_back(next_example());
      }
    }
    const StepMetrics m = train_step<float>(batch, params, opt, schedule);
    tokens_seen += m.tokens;
    if (s == 0) summary.first_loss = m.loss;
    summary.last_loss = m.loss;
    summary.steps = m.step;
    if (metrics.is_open() && (m.step % config.log_every == 0 || m.step == config.optimizer.total_steps)) {
      metrics << nlohmann::json{{"step", m.step}, {"loss", m.loss}, {"lr", m.lr}, {"tokens_seen", tokens_seen}}.dump()
              << '\n';
      metrics.flush();
    }
    if (on_step) on_step(m);
  }
  summary.base_hash_after = hash_base(params.base);
  summary.beacon_hash_after = hash_beacon(params.beacon);
  if (!config.output_checkpoint.empty()) {
    // File locations stay out of the checkpoint so equal runs give equal bytes.
    nlohmann::json reproducible = config;
    for (const char* key : {"corpus", "mix_corpus", "init_checkpoint", "output_checkpoint", "metrics"}) {
      reproducible.erase(key);
    }
    save_checkpoint(config.output_checkpoint, params,
                    {{"phase", config.phase == Phase::kBase ? "base" : "beacon"},
                     {"steps", summary.steps},
                     {"train_config", reproducible}});
  }
  return summary;
}

TrainSummary train_from_config(const TrainConfig& config, const StepCallback& on_step) {
  config.validate();
  if (config.corpus.empty()) throw ConfigError("train config has no corpus");
  const auto corpus = prepare_corpus(load_documents(config.corpus), config.min_len, config.max_len, config.seed);
  std::vector<TrainExample> mix;
  if (!config.mix_corpus.empty()) {
    mix = prepare_corpus(load_documents(config.mix_corpus), config.min_len, config.max_len, config.seed + 1);
  }
  ModelParams<float> params = config.init_checkpoint.empty() ? init_params<float>(config.model, config.seed)
                                                             : load_checkpoint<float>(config.init_checkpoint);
  if (!(params.config == config.model)) {
    throw ConfigError("init checkpoint " + config.init_checkpoint + " does not match the model config");
  }
  return run_training(config, params, corpus, mix, on_step);
}

#define BEACON_INSTANTIATE_TRAINER(T)                                                            \
  template LossResult compression_ar_loss<T>(Tape<T>&, const ModelConfig&, const BoundParams&,  \
                                             std::span<const std::int32_t>, std::span<const int>); \
  template LossResult vanilla_lm_loss<T>(Tape<T>&, const ModelConfig&, const BoundParams&,      \
                                         std::span<const std::int32_t>);                        \
  template struct OptState<T>;                                                                   \
  template OptState<T> make_optimizer<T>(const ModelParams<T>&, Phase, const OptimizerConfig&); \
  template StepMetrics train_step<T>(std::span<const TrainExample>, ModelParams<T>&,            \
                                     OptState<T>&, RatioSchedule&);                             \
  template double evaluate_loss<T>(std::span<const TrainExample>, const ModelParams<T>&, Phase, \
                                   RatioSchedule&);

BEACON_INSTANTIATE_TRAINER(float)
BEACON_INSTANTIATE_TRAINER(double)

}  // namespace beacon
