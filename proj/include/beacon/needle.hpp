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
#include <string>
#include <vector>

#include "beacon/compressor.hpp"
#include "json.hpp"

namespace beacon {

// A needle "#KV" plants key K (uppercase letter) with value V (digit) in a
// lowercase haystack. The question " ?K=" asks for V. Keys, values and the
// markers never occur in the haystack, so a value byte appears once.
struct Needle {
  char key = 'A';
  char value = '0';
  double depth = 0.0;       // fraction of the context
  std::int64_t offset = 0;  // byte offset of '#'
};

// The answer follows '=' so the answering position differs from the needle's key.
inline std::string question_for(char key) { return std::string(" ?") + key + '='; }

struct NeedleTask {
  std::int64_t id = 0;
  std::int64_t length = 0;  // context bytes
  std::string context;
  std::vector<Needle> needles;
  std::vector<std::string> questions;  // one per turn, needle order
  std::vector<std::string> answers;
};

void to_json(nlohmann::json& j, const NeedleTask& t);
void from_json(const nlohmann::json& j, NeedleTask& t);

struct NeedleGenConfig {
  std::uint64_t seed = 0;
  std::int64_t context_len = 256;
  std::int64_t chunk_size = 64;  // context_len must be at least two chunks
  std::vector<double> depths = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::int64_t num_cases = 200;
  bool multi = false;  // three needles at distinct depths, three turns
};

// Case i uses depths[i % depths.size()] (multi mode rotates through three
// distinct grid depths starting there).
std::vector<NeedleTask> gen_needle_tasks(const NeedleGenConfig& config);

// Training documents: a haystack of random length in [min_len, max_len] with
// 1..max_needles needles, followed by every question and its answer.
// Requires min_len >= 6 * max_needles. With decoy_rate > 0 each haystack
// letter becomes a random digit with that probability, so a value is only
// identified by the key before it.
std::vector<std::string> gen_needle_documents(std::uint64_t seed, std::int64_t count,
                                              std::int64_t min_len, std::int64_t max_len,
                                              int max_needles, double decoy_rate = 0.0);

std::string haystack(std::uint64_t seed, std::int64_t length);

void write_tasks(const std::filesystem::path& path, const std::vector<NeedleTask>& tasks);
std::vector<NeedleTask> read_tasks(const std::filesystem::path& path);

struct CellScore {
  std::int64_t length = 0;
  double depth = 0.0;
  std::int64_t correct = 0;
  std::int64_t total = 0;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

struct NeedleScore {
  std::vector<CellScore> cells;  // sorted by (length, depth)
  std::int64_t correct = 0;
  std::int64_t total = 0;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

// outputs[i][q] is the model's text for question q of task i. A question
// scores 1 when its output contains the answer.
NeedleScore score_needle(const std::vector<std::vector<std::string>>& outputs,
                         const std::vector<NeedleTask>& tasks);

// Chance of guessing a value: one of ten digits.
inline constexpr double kNeedleChance = 0.1;

// P[X >= k] for X ~ Binomial(n, p).
double binomial_upper_tail(std::int64_t k, std::int64_t n, double p);

struct NeedleEvalOptions {
  RatioPolicy policy = RatioPolicy::constant(2);
  std::uint64_t chunks_encoded = 0;  // filled in: total encodes over the run
};

// Compresses each context once, then answers every question from the same
// cache with greedy decoding of answer-length tokens.
template <typename T>
std::vector<std::vector<std::string>> run_needle_eval(const ModelParams<T>& params,
                                                      const std::vector<NeedleTask>& tasks,
                                                      NeedleEvalOptions& options);

}  // namespace beacon
