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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "beacon/analyzer.hpp"
#include "beacon/cache.hpp"
#include "beacon/checkpoint.hpp"
#include "beacon/container.hpp"
#include "beacon/needle.hpp"
#include "beacon/tokenizer.hpp"
#include "beacon/transformer.hpp"
#include "cli.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"

using namespace beacon;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json last_json(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  return json::parse(last);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

ModelConfig byte_tiny() {
  ModelConfig c = testutil::tiny_config();
  c.vocab_size = ByteTokenizer::kVocabSize;
  return c;  // w = 8, ratios {2, 4, 8}
}

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("beacon_cli_" + std::to_string(std::hash<std::string>{}(
                                                          doctest::getContextOptions()->currentTest->m_name)));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

std::string tiny_checkpoint(const Workdir& w, std::uint64_t seed = 1) {
  auto p = init_params<float>(byte_tiny(), seed);
  testutil::perturb_beacon(p, seed + 1);
  const std::string path = w / ("model" + std::to_string(seed) + ".bin");
  save_checkpoint(path, p);
  return path;
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("cli usage errors") {
  CHECK(run({}).code == cli::kUsage);
  CHECK(run({"frobnicate"}).code == cli::kUsage);
  CHECK(run({"flops", "--preset", "nope"}).code == cli::kUsage);
  const Result help = run({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("needle-eval") != std::string::npos);
}

TEST_CASE("cli flops") {
  Workdir w;
  SUBCASE("default grid") {
    const Result r = run({"flops", "--output", w / "curve.csv"});
    REQUIRE(r.code == cli::kOk);
    const auto rows = lines_of(slurp(w / "curve.csv"));
    REQUIRE(rows.size() == 1 + 32);
    CHECK(rows[0] == "n,flops_full,flops_beacon_x8,ratio_x8");
    CHECK(rows[1].rfind("8192,", 0) == 0);
    CHECK(rows.back().rfind("262144,", 0) == 0);
    const json s = last_json(r.out);
    CHECK(s["n"] == 262144);
    CHECK(s["ratio_x8"].get<double>() >= 4.0);
  }
  SUBCASE("tiny spec matches the analyzer") {
    const Result r = run({"flops", "--preset", "desk", "--layers", "2", "--hidden", "8", "--query-heads", "2",
                          "--kv-heads", "1", "--head-dim", "4", "--intermediate", "16", "--vocab", "32",
                          "--chunk-size", "4", "--alpha", "2", "--lengths", "1,4,9", "--output", "-"});
    REQUIRE(r.code == cli::kOk);
    FlopsSpec s;
    s.layers = 2;
    s.hidden = 8;
    s.query_heads = 2;
    s.kv_heads = 1;
    s.head_dim = 4;
    s.intermediate = 16;
    s.vocab = 32;
    s.chunk_size = 4;
    s.alpha = 2;
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < 3; ++i) {
      const std::int64_t n = std::vector<std::int64_t>{1, 4, 9}[i];
      const std::string prefix =
          std::to_string(n) + "," + to_string(flops_full(n, s)) + "," + to_string(flops_beacon(n, s)) + ",";
      CHECK(rows[i + 1].rfind(prefix, 0) == 0);
    }
  }
  SUBCASE("config file shared with the trainer") {
    write(w / "cfg.json", json{{"model", json(byte_tiny())}, {"flops", {{"alpha", json::array({2, 4})}}}}.dump());
    const Result r = run({"flops", "--config", w / "cfg.json", "--lengths", "64", "--output", "-"});
    REQUIRE(r.code == cli::kOk);
    CHECK(lines_of(r.out)[0] == "n,flops_full,flops_beacon_x2,flops_beacon_x4,ratio_x2,ratio_x4");
  }
  SUBCASE("invalid spec") {
    CHECK(run({"flops", "--softmax", "odd", "--output", "-"}).code == cli::kConfig);
    CHECK(run({"flops", "--alpha", "0", "--output", "-"}).code == cli::kConfig);
  }
}

TEST_CASE("cli needle-gen") {
  Workdir w;
  const std::vector<std::string> args = {"needle-gen", "--seed", "3", "--cases", "20", "--train-docs", "10"};
  auto with = [&](const std::string& tag) {
    auto a = args;
    a.insert(a.end(), {"--output", w / (tag + ".jsonl"), "--docs-output", w / (tag + ".txt")});
    return a;
  };
  REQUIRE(run(with("a")).code == cli::kOk);
  REQUIRE(run(with("b")).code == cli::kOk);
  CHECK(slurp(w / "a.jsonl") == slurp(w / "b.jsonl"));
  CHECK(slurp(w / "a.txt") == slurp(w / "b.txt"));
  CHECK(lines_of(slurp(w / "a.jsonl")).size() == 20);
  CHECK(lines_of(slurp(w / "a.txt")).size() == 10);
  CHECK(run({"needle-gen", "--context-len", "64", "--output", w / "c.jsonl"}).code == cli::kConfig);
}

TEST_CASE("cli train") {
  Workdir w;
  std::string docs;
  for (int i = 0; i < 40; ++i) docs += haystack(static_cast<std::uint64_t>(i), 40) + "\n";
  write(w / "corpus.txt", docs);
  const json config = {{"model", json(byte_tiny())},
                       {"phase", "beacon"},
                       {"lr", 1e-2},
                       {"total_steps", 50},
                       {"batch_size", 2},
                       {"seed", 5},
                       {"corpus", "corpus.txt"},
                       {"output_checkpoint", "out.bin"},
                       {"metrics", "metrics.jsonl"}};
  write(w / "train.json", config.dump());

  const Result r = run({"train", "--config", w / "train.json"});
  REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  CHECK(fs::exists(w / "out.bin"));
  const auto metrics = lines_of(slurp(w / "metrics.jsonl"));
  CHECK(metrics.size() == 50);
  const json summary = last_json(r.out);
  CHECK(summary["steps"] == 50);
  CHECK(summary["base_hash_before"] == summary["base_hash_after"]);

  const std::string first = slurp(w / "out.bin");
  REQUIRE(run({"train", "--config", w / "train.json", "--output", w / "again.bin", "--metrics",
               w / "again.jsonl"})
              .code == cli::kOk);
  CHECK(slurp(w / "again.bin") == first);
  CHECK(slurp(w / "again.jsonl") == slurp(w / "metrics.jsonl"));

  json bad = config;
  bad["lr"] = -1.0;
  write(w / "bad.json", bad.dump());
  CHECK(run({"train", "--config", w / "bad.json"}).code == cli::kConfig);
  json missing = config;
  missing["corpus"] = "absent.txt";
  write(w / "missing.json", missing.dump());
  CHECK(run({"train", "--config", w / "missing.json"}).code == cli::kData);
}

TEST_CASE("cli compress") {
  Workdir w;
  const std::string ckpt = tiny_checkpoint(w);
  write(w / "ctx.txt", haystack(1, 64));  // n = 8w

  const Result r = run({"compress", "--checkpoint", ckpt, "--input", w / "ctx.txt", "--ratio", "8", "--output",
                        w / "a.snap"});
  REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  const json s = last_json(r.out);
  CHECK(s["n"] == 64);
  CHECK(s["chunks"] == 8);
  CHECK(s["m"] == 8);
  CHECK(s["predicted_m"] == 8);
  CHECK(s["entries_ratio"].get<double>() == 8.0);

  // Later questions never touch the snapshot.
  REQUIRE(run({"compress", "--checkpoint", ckpt, "--input", w / "ctx.txt", "--ratio", "8", "--output",
               w / "b.snap"})
              .code == cli::kOk);
  for (const char* q : {" ?A", " ?Q"}) {
    REQUIRE(run({"generate", "--checkpoint", ckpt, "--cache", w / "b.snap", "--prompt", q, "--max-new", "3",
                 "--ratio", "8"})
                .code == cli::kOk);
  }
  CHECK(slurp(w / "a.snap") == slurp(w / "b.snap"));

  // Appending the second half equals compressing everything.
  write(w / "h1.txt", haystack(1, 64).substr(0, 24));
  write(w / "h2.txt", haystack(1, 64).substr(24));
  REQUIRE(run({"compress", "--checkpoint", ckpt, "--input", w / "h1.txt", "--ratio", "8", "--output",
               w / "h1.snap"})
              .code == cli::kOk);
  REQUIRE(run({"compress", "--checkpoint", ckpt, "--input", w / "h2.txt", "--ratio", "8", "--append",
               w / "h1.snap", "--output", w / "h12.snap"})
              .code == cli::kOk);
  CHECK(slurp(w / "h12.snap") == slurp(w / "a.snap"));

  // Policy agrees with the analyzer for every constant ratio.
  for (int alpha : {2, 4, 8}) {
    const Result q = run({"compress", "--checkpoint", ckpt, "--text", haystack(9, 45), "--ratio",
                          std::to_string(alpha), "--output", w / "c.snap"});
    REQUIRE(q.code == cli::kOk);
    const json j = last_json(q.out);
    CHECK(j["m"] == kv_cache_entries(45, 8, alpha, {2, 4, 8}).beacon);
    CHECK(j["m"] == j["predicted_m"]);
  }
  CHECK(run({"compress", "--checkpoint", ckpt, "--text", "abc", "--ratio", "16", "--output", w / "d.snap"}).code ==
        cli::kConfig);
}

TEST_CASE("cli generate") {
  Workdir w;
  const std::string ckpt = tiny_checkpoint(w);
  const auto params = load_checkpoint<float>(ckpt);

  SUBCASE("empty cache equals vanilla greedy decoding") {
    const std::string prompt = "ab c";
    const Result r = run({"generate", "--checkpoint", ckpt, "--prompt", prompt, "--max-new", "3"});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    auto ids = ByteTokenizer::encode(prompt);
    std::vector<std::int32_t> produced;
    for (int i = 0; i < 3; ++i) {
      const auto logits = vanilla_logits(params, ids);
      const auto row = logits.row(logits.rows() - 1);
      const auto next = static_cast<std::int32_t>(std::max_element(row.begin(), row.end()) - row.begin());
      produced.push_back(next);
      ids.push_back(next);
    }
    CHECK(r.out == ByteTokenizer::decode(produced) + "\n");
  }
  SUBCASE("greedy determinism") {
    write(w / "ctx.txt", haystack(2, 40));
    const std::vector<std::string> args = {"generate", "--checkpoint", ckpt, "--context", w / "ctx.txt",
                                           "--prompt", " ?B", "--max-new", "12"};
    const Result a = run(args);
    const Result b = run(args);
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == b.out);
  }
  SUBCASE("multi-turn reuses the cache") {
    write(w / "ctx.txt", haystack(3, 32));  // four full chunks
    const Result r = run({"generate", "--checkpoint", ckpt, "--context", w / "ctx.txt", "--prompt", " ?A",
                          "--prompt", " ?B", "--max-new", "2", "--json", "--save-cache", w / "after.snap"});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const auto turns = lines_of(r.out);
    REQUIRE(turns.size() == 2);
    const json t1 = json::parse(turns[0]);
    const json t2 = json::parse(turns[1]);
    CHECK(t1["n"] == 32);
    CHECK(t1["m"] == 16);
    // Turn one (5 tokens) is appended as one pending chunk; the four context
    // chunks are not encoded again.
    CHECK(t2["n"] == 37);
    CHECK(t2["chunks"] == 5);
    CHECK(t2["prompt_chunks_encoded"] == 0);
    CHECK(t2["decode_chunks_encoded"] == 0);
    const auto snap = load_cache_snapshot<float>(w / "after.snap", params.config);
    CHECK(snap.consumed_tokens == 42);
    CHECK(snap.finalized_chunks == 5);
  }
  SUBCASE("snapshot from another model is refused") {
    ModelConfig other = byte_tiny();
    other.chunk_size = 16;
    const std::string ckpt2 = w / "other.bin";
    save_checkpoint(ckpt2, init_params<float>(other, 3));
    REQUIRE(run({"compress", "--checkpoint", ckpt2, "--text", "hello world", "--output", w / "o.snap"}).code ==
            cli::kOk);
    const Result r = run({"generate", "--checkpoint", ckpt, "--cache", w / "o.snap", "--prompt", "x"});
    CHECK(r.code == cli::kState);
    CHECK(r.err.find("error:") == 0);
  }
  SUBCASE("bad requests") {
    CHECK(run({"generate", "--checkpoint", ckpt, "--prompt", "x", "--max-new", "0"}).code == cli::kUsage);
    CHECK(run({"generate", "--checkpoint", ckpt, "--prompt", ""}).code == cli::kUsage);
    CHECK(run({"generate", "--checkpoint", ckpt, "--prompt", "x", "--temperature", "-1"}).code == cli::kConfig);
  }
}

TEST_CASE("cli needle-eval") {
  Workdir w;
  const std::string ckpt = tiny_checkpoint(w);
  REQUIRE(run({"needle-gen", "--context-len", "32", "--chunk-size", "8", "--cases", "6", "--output",
               w / "tasks.jsonl"})
              .code == cli::kOk);
  const Result r = run({"needle-eval", "--checkpoint", ckpt, "--tasks", w / "tasks.jsonl", "--ratio", "2",
                        "--outputs", w / "out.jsonl"});
  REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
  const json s = last_json(r.out);
  CHECK(s["total"] == 6);
  CHECK(s["chunks_encoded"] == 6 * 4);
  CHECK(s["cells"].size() == 5);
  CHECK(lines_of(slurp(w / "out.jsonl")).size() == 6);
  const Result limited = run({"needle-eval", "--checkpoint", ckpt, "--tasks", w / "tasks.jsonl", "--limit", "2"});
  CHECK(last_json(limited.out)["total"] == 2);
}
