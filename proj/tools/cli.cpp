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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "beacon/analyzer.hpp"
#include "beacon/cache.hpp"
#include "beacon/checkpoint.hpp"
#include "beacon/compressor.hpp"
#include "beacon/errors.hpp"
#include "beacon/needle.hpp"
#include "beacon/tokenizer.hpp"
#include "beacon/trainer.hpp"
#include "json.hpp"

namespace beacon::cli {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Ratio policy flags shared by compress, generate and needle-eval. The first
// of --policy, --adaptive, --ratios and --ratio that is given wins; the
// default is a constant smallest ratio of the model.
struct PolicyFlags {
  std::string policy_file;
  bool adaptive = false;
  std::vector<int> ratios;
  std::optional<std::uint64_t> random_seed;
  int ratio = 0;

  void add(CLI::App* app) {
    app->add_option("--policy", policy_file, "JSON ratio policy file")->check(CLI::ExistingFile);
    app->add_flag("--adaptive", adaptive, "Desk adaptive table: x2 up to 128 tokens, x4 up to 256, x8 beyond");
    app->add_option("--ratios", ratios, "Per-chunk ratios, last one repeats")->delimiter(',');
    app->add_option("--random-seed", random_seed, "Draw each chunk's ratio from --ratios with this seed");
    app->add_option("--ratio", ratio, "Constant compression ratio");
  }

  RatioPolicy build(const ModelConfig& config) const {
    RatioPolicy p = RatioPolicy::constant(*std::min_element(config.ratio_set.begin(), config.ratio_set.end()));
    if (!policy_file.empty()) {
      p = policy_from_json(read_json(policy_file));
    } else if (adaptive) {
      p = RatioPolicy::desk_adaptive();
    } else if (!ratios.empty()) {
      p = random_seed ? RatioPolicy::random(ratios, *random_seed) : RatioPolicy::explicit_list(ratios);
    } else if (random_seed) {
      p = RatioPolicy::random(config.ratio_set, *random_seed);
    } else if (ratio != 0) {
      p = RatioPolicy::constant(ratio);
    }
    p.validate(config);
    return p;
  }

  std::optional<int> constant_ratio(const ModelConfig& config) const {
    if (!policy_file.empty() || adaptive || !ratios.empty() || random_seed) return std::nullopt;
    return ratio != 0 ? ratio : *std::min_element(config.ratio_set.begin(), config.ratio_set.end());
  }
};

// Model output may hold any byte; invalid UTF-8 is replaced in JSON output.
std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json cache_stats(const CompressedCache<float>& cache) {
  const std::int64_t chunks =
      static_cast<std::int64_t>(cache.finalized_chunks) + (cache.pending_tokens.empty() ? 0 : 1);
  return {{"n", cache.consumed_tokens},
          {"chunks", chunks},
          {"m", cache.m},
          {"entries_ratio", cache.m == 0 ? 0.0 : static_cast<double>(cache.consumed_tokens) / static_cast<double>(cache.m)}};
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::optional<std::int64_t> steps;
  std::string output;
  std::string metrics;
  std::string init;
  std::string phase;
  bool reset_beacon = false;
  std::int64_t progress = 0;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  TrainConfig config = load_train_config(a.config);
  if (a.steps) config.optimizer.total_steps = *a.steps;
  if (!a.output.empty()) config.output_checkpoint = a.output;
  if (!a.metrics.empty()) config.metrics = a.metrics;
  if (!a.init.empty()) config.init_checkpoint = a.init;
  if (!a.phase.empty()) config.phase = a.phase == "base" ? Phase::kBase : Phase::kBeacon;
  if (a.reset_beacon) config.reset_beacon = true;
  const TrainSummary s = train_from_config(config, [&](const StepMetrics& m) {
    if (a.progress > 0 && m.step % a.progress == 0) {
      err << "step " << m.step << " loss " << m.loss << " lr " << m.lr << '\n';
    }
  });
  out << dump(json{{"steps", s.steps},
              {"first_loss", s.first_loss},
              {"last_loss", s.last_loss},
              {"base_hash_before", s.base_hash_before},
              {"base_hash_after", s.base_hash_after},
              {"beacon_hash", s.beacon_hash_after},
              {"checkpoint", config.output_checkpoint},
              {"metrics", config.metrics}})
             
      << '\n';
  return kOk;
}

// ---- compress -------------------------------------------------------------

struct CompressArgs {
  std::string checkpoint;
  std::string input;
  std::string text;
  std::string output;
  std::string append;
  PolicyFlags policy;
};

int cmd_compress(const CompressArgs& a, std::ostream& out, std::ostream&) {
  const auto params = load_checkpoint<float>(a.checkpoint);
  const RatioPolicy policy = a.policy.build(params.config);
  const auto tokens = ByteTokenizer::encode(a.input.empty() ? a.text : read_file(a.input));
  CompressedCache<float> cache =
      a.append.empty() ? empty_cache<float>(params.config) : load_cache_snapshot<float>(a.append, params.config);
  cache = append_context(params, cache, tokens, policy);
  save_cache_snapshot(a.output, cache);
  json stats = cache_stats(cache);
  stats["chunks_encoded"] = cache.chunks_encoded;
  if (const auto alpha = a.policy.constant_ratio(params.config); alpha && a.append.empty() && !tokens.empty()) {
    stats["predicted_m"] =
        kv_cache_entries(static_cast<std::int64_t>(tokens.size()), params.config.chunk_size, *alpha,
                         params.config.ratio_set)
            .beacon;
  }
  out << dump(stats) << '\n';
  return kOk;
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  std::string checkpoint;
  std::string cache;
  std::string context;
  std::vector<std::string> prompts;
  int max_new = 32;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  bool stop_eos = false;
  bool as_json = false;
  std::string save_cache;
  PolicyFlags policy;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream&) {
  const auto params = load_checkpoint<float>(a.checkpoint);
  const ModelConfig& config = params.config;
  const RatioPolicy policy = a.policy.build(config);
  if (!a.cache.empty() && !a.context.empty()) throw UsageError("give --cache or --context, not both");
  CompressedCache<float> cache;
  if (!a.cache.empty()) {
    cache = load_cache_snapshot<float>(a.cache, config);
  } else {
    cache = empty_cache<float>(config);
    if (!a.context.empty()) cache = append_context(params, cache, ByteTokenizer::encode(read_file(a.context)), policy);
  }
  if (!(a.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  Sampling sampling;
  if (a.temperature > 0.0) {
    sampling.mode = Sampling::Mode::kTemperature;
    sampling.temperature = a.temperature;
  }
  sampling.seed = a.seed;
  if (a.stop_eos) sampling.stop_token = ByteTokenizer::kEos;

  const std::size_t tail_max = static_cast<std::size_t>(config.chunk_size - 1);
  for (std::size_t turn = 0; turn < a.prompts.size(); ++turn) {
    const std::uint64_t before = cache.chunks_encoded;
    auto tokens = ByteTokenizer::encode(a.prompts[turn]);
    if (tokens.empty()) throw UsageError("prompt for turn " + std::to_string(turn + 1) + " is empty");
    // Long prompts go into the cache; the last chunk_size-1 tokens stay raw.
    if (tokens.size() > tail_max) {
      const std::size_t head = tokens.size() - tail_max;
      cache = append_context(params, cache, std::span<const std::int32_t>(tokens.data(), head), policy);
      tokens.erase(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(head));
    }
    const std::uint64_t prompt_encodes = cache.chunks_encoded - before;
    GenerateStats stats;
    const auto generated = generate(params, cache, tokens, a.max_new, sampling, policy, &stats);
    const std::string text = ByteTokenizer::decode(generated);
    if (a.as_json) {
      json line = cache_stats(cache);
      line["turn"] = turn + 1;
      line["output"] = text;
      line["prompt_chunks_encoded"] = prompt_encodes;
      line["decode_chunks_encoded"] = stats.chunks_encoded;
      out << dump(line) << '\n';
    } else {
      out << text << '\n';
    }
    // The finished turn joins the context for the next one.
    if (turn + 1 < a.prompts.size() || !a.save_cache.empty()) {
      tokens.insert(tokens.end(), generated.begin(), generated.end());
      cache = append_context(params, cache, tokens, policy);
    }
  }
  if (!a.save_cache.empty()) save_cache_snapshot(a.save_cache, cache);
  return kOk;
}

// ---- flops ----------------------------------------------------------------

struct FlopsArgs {
  std::string preset = "llama2-7b";
  std::string config;
  std::optional<std::int64_t> layers, hidden, query_heads, kv_heads, head_dim, intermediate, vocab, chunk_size;
  std::vector<int> alphas;
  std::vector<std::int64_t> lengths;
  std::int64_t grid_step = 8192;
  std::int64_t grid_max = 262144;
  std::string softmax = "literal";
  std::string output = "flops.csv";
};

// A trainer config contributes its "model" block; an optional "flops" block
// may set alpha (number or list) and softmax.
void apply_config(const json& j, FlopsSpec& spec, std::vector<int>& alphas, std::string& softmax) {
  try {
    if (j.contains("model")) {
      const ModelConfig m = j.at("model").get<ModelConfig>();
      spec.layers = m.num_layers;
      spec.hidden = m.hidden_size;
      spec.query_heads = m.query_heads;
      spec.kv_heads = m.kv_heads;
      spec.head_dim = m.head_dim;
      spec.intermediate = m.intermediate_size;
      spec.vocab = m.vocab_size;
      spec.chunk_size = m.chunk_size;
    }
    if (j.contains("flops")) {
      const json& f = j.at("flops");
      if (f.contains("alpha")) {
        alphas = f.at("alpha").is_array() ? f.at("alpha").get<std::vector<int>>()
                                          : std::vector<int>{f.at("alpha").get<int>()};
      }
      softmax = f.value("softmax", softmax);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("flops config: ") + e.what());
  }
}

int cmd_flops(const FlopsArgs& a, std::ostream& out, std::ostream&) {
  FlopsSpec spec = flops_preset(a.preset);
  std::vector<int> alphas = {spec.alpha};
  std::string softmax = a.softmax;
  if (!a.config.empty()) apply_config(read_json(a.config), spec, alphas, softmax);
  for (auto [field, value] : {std::pair{&spec.layers, a.layers}, {&spec.hidden, a.hidden},
                              {&spec.query_heads, a.query_heads}, {&spec.kv_heads, a.kv_heads},
                              {&spec.head_dim, a.head_dim}, {&spec.intermediate, a.intermediate},
                              {&spec.vocab, a.vocab}, {&spec.chunk_size, a.chunk_size}}) {
    if (value) *field = *value;
  }
  if (!a.alphas.empty()) alphas = a.alphas;
  if (softmax == "literal") {
    spec.softmax = SoftmaxCount::kLiteral;
  } else if (softmax == "corrected") {
    spec.softmax = SoftmaxCount::kCorrected;
  } else {
    throw ConfigError("softmax must be 'literal' or 'corrected'");
  }
  spec.alpha = alphas.front();
  spec.validate();

  std::vector<std::int64_t> lengths = a.lengths;
  if (lengths.empty()) {
    if (a.grid_step < 1 || a.grid_max < a.grid_step) throw ConfigError("need 1 <= grid-step <= grid-max");
    for (std::int64_t n = a.grid_step; n <= a.grid_max; n += a.grid_step) lengths.push_back(n);
  }
  const auto rows = emit_curve(spec, lengths, alphas);
  if (a.output == "-") {
    write_curve_csv(out, rows, alphas);
    return kOk;
  }
  std::ofstream file(a.output, std::ios::trunc);
  if (!file) throw DataError("cannot write " + a.output);
  write_curve_csv(file, rows, alphas);
  json summary = {{"rows", rows.size()}, {"output", a.output}, {"n", rows.back().n},
                  {"flops_full", to_string(rows.back().full)}};
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    summary["flops_beacon_x" + std::to_string(alphas[i])] = to_string(rows.back().beacon[i]);
    summary["ratio_x" + std::to_string(alphas[i])] = rows.back().ratio[i];
  }
  out << dump(summary) << '\n';
  return kOk;
}

// ---- needle-gen -----------------------------------------------------------

struct NeedleGenArgs {
  NeedleGenConfig gen;
  std::string output = "needle_tasks.jsonl";
  std::int64_t train_docs = 0;
  std::string docs_output = "needle_docs.txt";
  std::int64_t doc_min = 128;
  std::int64_t doc_max = 320;
  int doc_needles = 4;
  double doc_decoys = 0.0;
};

int cmd_needle_gen(const NeedleGenArgs& a, std::ostream& out, std::ostream&) {
  const auto tasks = gen_needle_tasks(a.gen);
  write_tasks(a.output, tasks);
  json summary = {{"tasks", tasks.size()}, {"output", a.output}};
  if (a.train_docs > 0) {
    // Training documents use a seed stream disjoint from the tasks.
    const auto docs = gen_needle_documents(a.gen.seed ^ 0x5bd1e995ULL, a.train_docs, a.doc_min, a.doc_max,
                                           a.doc_needles, a.doc_decoys);
    std::ofstream file(a.docs_output, std::ios::trunc);
    if (!file) throw DataError("cannot write " + a.docs_output);
    for (const std::string& d : docs) file << d << '\n';
    summary["docs"] = docs.size();
    summary["docs_output"] = a.docs_output;
  }
  out << dump(summary) << '\n';
  return kOk;
}

// ---- needle-eval ----------------------------------------------------------

struct NeedleEvalArgs {
  std::string checkpoint;
  std::string tasks;
  std::string outputs;
  std::int64_t limit = 0;
  PolicyFlags policy;
};

int cmd_needle_eval(const NeedleEvalArgs& a, std::ostream& out, std::ostream&) {
  const auto params = load_checkpoint<float>(a.checkpoint);
  auto tasks = read_tasks(a.tasks);
  if (a.limit > 0 && static_cast<std::size_t>(a.limit) < tasks.size()) tasks.resize(static_cast<std::size_t>(a.limit));
  if (tasks.empty()) throw DataError(a.tasks + " has no tasks");
  NeedleEvalOptions options;
  options.policy = a.policy.build(params.config);
  const auto outputs = run_needle_eval(params, tasks, options);
  if (!a.outputs.empty()) {
    std::ofstream file(a.outputs, std::ios::trunc);
    if (!file) throw DataError("cannot write " + a.outputs);
    for (std::size_t i = 0; i < tasks.size(); ++i) file << dump(json{{"id", tasks[i].id}, {"outputs", outputs[i]}}) << '\n';
  }
  const NeedleScore score = score_needle(outputs, tasks);
  json cells = json::array();
  for (const CellScore& c : score.cells) {
    cells.push_back({{"length", c.length}, {"depth", c.depth}, {"correct", c.correct}, {"total", c.total},
                     {"accuracy", c.accuracy()}});
  }
  out << dump(json{{"correct", score.correct},
              {"total", score.total},
              {"accuracy", score.accuracy()},
              {"chance", kNeedleChance},
              {"p_value", binomial_upper_tail(score.correct, score.total, kNeedleChance)},
              {"chunks_encoded", options.chunks_encoded},
              {"cells", cells}})
             
      << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Activation-beacon context compression toolkit", "beacon"};
  app.require_subcommand(1);
  app.get_formatter()->column_width(36);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train from a JSON config; writes a checkpoint and JSONL metrics");
  t->add_option("--config", train.config, "Training config (JSON)")->required()->check(CLI::ExistingFile);
  t->add_option("--steps", train.steps, "Override total_steps");
  t->add_option("--output", train.output, "Override output_checkpoint");
  t->add_option("--metrics", train.metrics, "Override metrics path");
  t->add_option("--init", train.init, "Override init_checkpoint");
  t->add_option("--phase", train.phase, "Override phase")->check(CLI::IsMember({"base", "beacon"}));
  t->add_flag("--reset-beacon", train.reset_beacon, "Copy beacon Q/K/V from the base before a beacon phase");
  t->add_option("--progress", train.progress, "Print loss to stderr every N steps (0: off)")->capture_default_str();

  CompressArgs compress;
  auto* c = app.add_subcommand("compress", "Compress a context into a cache snapshot; prints {n, chunks, m, entries_ratio}");
  c->add_option("--checkpoint", compress.checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  auto* c_in = c->add_option("--input", compress.input, "Context file (bytes)")->check(CLI::ExistingFile);
  auto* c_text = c->add_option("--text", compress.text, "Context given inline");
  c_in->excludes(c_text);
  c->add_option("--output", compress.output, "Snapshot to write")->required();
  c->add_option("--append", compress.append, "Continue from this snapshot")->check(CLI::ExistingFile);
  compress.policy.add(c);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Decode from a compressed context; one output line per --prompt turn");
  g->add_option("--checkpoint", gen.checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  g->add_option("--cache", gen.cache, "Cache snapshot to start from")->check(CLI::ExistingFile);
  g->add_option("--context", gen.context, "Raw context file, compressed first")->check(CLI::ExistingFile);
  g->add_option("--prompt", gen.prompts, "Prompt; repeat for further turns")->required();
  g->add_option("--max-new", gen.max_new, "Tokens to generate per turn")->capture_default_str();
  g->add_option("--temperature", gen.temperature, "Sampling temperature (0: greedy)")->capture_default_str();
  g->add_option("--seed", gen.seed, "Sampling seed")->capture_default_str();
  g->add_flag("--stop-eos", gen.stop_eos, "Stop a turn at end-of-document");
  g->add_flag("--json", gen.as_json, "One JSON line per turn with cache and encode counts");
  g->add_option("--save-cache", gen.save_cache, "Write the cache including all turns");
  gen.policy.add(g);

  FlopsArgs flops;
  auto* f = app.add_subcommand("flops", "Write the full-vs-beacon FLOPs curve as CSV");
  f->add_option("--preset", flops.preset, "Architecture preset")
      ->check(CLI::IsMember(flops_preset_names()))
      ->capture_default_str();
  f->add_option("--config", flops.config, "Trainer-style JSON config (model block, optional flops block)")
      ->check(CLI::ExistingFile);
  f->add_option("--layers", flops.layers, "Override L");
  f->add_option("--hidden", flops.hidden, "Override D");
  f->add_option("--query-heads", flops.query_heads, "Override query heads");
  f->add_option("--kv-heads", flops.kv_heads, "Override key/value heads");
  f->add_option("--head-dim", flops.head_dim, "Override head dim");
  f->add_option("--intermediate", flops.intermediate, "Override MLP width");
  f->add_option("--vocab", flops.vocab, "Override vocabulary size");
  f->add_option("--chunk-size", flops.chunk_size, "Override chunk size w");
  f->add_option("--alpha", flops.alphas, "Compression ratios, one column each")->delimiter(',');
  f->add_option("--lengths", flops.lengths, "Explicit length grid")->delimiter(',');
  f->add_option("--grid-step", flops.grid_step, "Default grid step")->capture_default_str();
  f->add_option("--grid-max", flops.grid_max, "Default grid maximum")->capture_default_str();
  f->add_option("--softmax", flops.softmax, "Softmax cost: literal or corrected")->capture_default_str();
  f->add_option("--output", flops.output, "CSV path, '-' for stdout")->capture_default_str();

  NeedleGenArgs ng;
  auto* n = app.add_subcommand("needle-gen", "Write needle retrieval tasks (JSONL) and optional training documents");
  n->add_option("--seed", ng.gen.seed, "Seed")->capture_default_str();
  n->add_option("--context-len", ng.gen.context_len, "Context bytes")->capture_default_str();
  n->add_option("--chunk-size", ng.gen.chunk_size, "Chunk size (context must span two)")->capture_default_str();
  n->add_option("--depths", ng.gen.depths, "Depth grid")->delimiter(',')->capture_default_str();
  n->add_option("--cases", ng.gen.num_cases, "Number of tasks")->capture_default_str();
  n->add_flag("--multi", ng.gen.multi, "Three needles and three turns per task");
  n->add_option("--output", ng.output, "Task file")->capture_default_str();
  n->add_option("--train-docs", ng.train_docs, "Also write this many training documents")->capture_default_str();
  n->add_option("--docs-output", ng.docs_output, "Training documents, one per line")->capture_default_str();
  n->add_option("--doc-min", ng.doc_min, "Shortest haystack")->capture_default_str();
  n->add_option("--doc-max", ng.doc_max, "Longest haystack")->capture_default_str();
  n->add_option("--doc-needles", ng.doc_needles, "Most needles per document")->capture_default_str();
  n->add_option("--doc-decoys", ng.doc_decoys, "Probability that a haystack letter becomes a decoy digit")
      ->capture_default_str();

  NeedleEvalArgs ne;
  auto* e = app.add_subcommand("needle-eval", "Score a checkpoint on needle tasks through the compressed cache");
  e->add_option("--checkpoint", ne.checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
  e->add_option("--tasks", ne.tasks, "Task file from needle-gen")->required()->check(CLI::ExistingFile);
  e->add_option("--outputs", ne.outputs, "Write model outputs (JSONL)");
  e->add_option("--limit", ne.limit, "Evaluate only the first N tasks (0: all)")->capture_default_str();
  ne.policy.add(e);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (t->parsed()) return cmd_train(train, out, err);
    if (c->parsed()) return cmd_compress(compress, out, err);
    if (g->parsed()) return cmd_generate(gen, out, err);
    if (f->parsed()) return cmd_flops(flops, out, err);
    if (n->parsed()) return cmd_needle_gen(ng, out, err);
    if (e->parsed()) return cmd_needle_eval(ne, out, err);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return kConfig;
  } catch (const DataError& ex) {
    err << "error: " << ex.what() << '\n';
    return kData;
  } catch (const StateError& ex) {
    err << "error: " << ex.what() << '\n';
    return kState;
  } catch (const NumericError& ex) {
    err << "error: " << ex.what() << '\n';
    return kNumeric;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace beacon::cli
