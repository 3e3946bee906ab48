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

#include "beacon/needle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include <boost/math/distributions/binomial.hpp>

#include "beacon/errors.hpp"
#include "beacon/tokenizer.hpp"

namespace beacon {

namespace {

constexpr const char* kWords[] = {"the", "cat", "sat", "on", "a", "warm", "mat", "and",
                                  "dog", "ran", "far", "into", "old", "green", "hills", "slowly"};

std::int64_t needle_offset(double depth, std::int64_t length) {
  return std::llround(depth * static_cast<double>(length - 3));
}

bool overlaps(const std::vector<Needle>& placed, std::int64_t offset) {
  return std::any_of(placed.begin(), placed.end(),
                     [&](const Needle& n) { return std::llabs(n.offset - offset) < 4; });
}

std::vector<char> distinct(std::mt19937_64& rng, std::string pool, std::size_t count) {
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng() % i]);
  return std::vector<char>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
}

void plant(std::string& context, const Needle& n) {
  context[static_cast<std::size_t>(n.offset)] = '#';
  context[static_cast<std::size_t>(n.offset + 1)] = n.key;
  context[static_cast<std::size_t>(n.offset + 2)] = n.value;
}

}  // namespace

std::string haystack(std::uint64_t seed, std::int64_t length) {
  std::mt19937_64 rng(seed);
  std::string out;
  while (static_cast<std::int64_t>(out.size()) < length) {
    if (!out.empty()) out.push_back(' ');
    out += kWords[rng() % std::size(kWords)];
  }
  out.resize(static_cast<std::size_t>(length));
  return out;
}

void to_json(nlohmann::json& j, const NeedleTask& t) {
  nlohmann::json needles = nlohmann::json::array();
  for (const Needle& n : t.needles) {
    needles.push_back({{"key", std::string(1, n.key)},
                       {"value", std::string(1, n.value)},
                       {"depth", n.depth},
                       {"offset", n.offset}});
  }
  j = {{"id", t.id},           {"length", t.length},       {"context", t.context},
       {"needles", needles},   {"questions", t.questions}, {"answers", t.answers}};
}

void from_json(const nlohmann::json& j, NeedleTask& t) {
  t.id = j.at("id").get<std::int64_t>();
  t.length = j.at("length").get<std::int64_t>();
  t.context = j.at("context").get<std::string>();
  t.needles.clear();
  for (const auto& n : j.at("needles")) {
    const auto key = n.at("key").get<std::string>();
    const auto value = n.at("value").get<std::string>();
    if (key.size() != 1 || value.size() != 1) throw DataError("needle key and value are single bytes");
    t.needles.push_back(Needle{key[0], value[0], n.at("depth").get<double>(), n.at("offset").get<std::int64_t>()});
  }
  t.questions = j.at("questions").get<std::vector<std::string>>();
  t.answers = j.at("answers").get<std::vector<std::string>>();
  if (t.questions.size() != t.answers.size() || t.questions.size() != t.needles.size()) {
    throw DataError("task " + std::to_string(t.id) + " has mismatched needles, questions and answers");
  }
}

std::vector<NeedleTask> gen_needle_tasks(const NeedleGenConfig& config) {
  if (config.chunk_size < 1 || config.context_len < 2 * config.chunk_size) {
    throw ConfigError("needle contexts must span at least two chunks");
  }
  if (config.depths.empty() || config.num_cases < 1) throw ConfigError("needle grid is empty");
  for (double d : config.depths) {
    if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("needle depth outside [0, 1]");
  }
  const std::size_t per_task = config.multi ? 3 : 1;
  if (config.multi && config.depths.size() < 3) throw ConfigError("multi-needle mode needs three depths");

  std::mt19937_64 rng(config.seed);
  std::vector<NeedleTask> tasks;
  for (std::int64_t i = 0; i < config.num_cases; ++i) {
    NeedleTask t;
    t.id = i;
    t.length = config.context_len;
    t.context = haystack(rng(), config.context_len);
    const auto keys = distinct(rng, "ABCDEFGHIJKLMNOPQRSTUVWXYZ", per_task);
    const auto values = distinct(rng, "0123456789", per_task);
    const std::size_t g = config.depths.size();
    const std::size_t stride = std::max<std::size_t>(1, g / 3);
    for (std::size_t k = 0; k < per_task; ++k) {
      const double depth = config.depths[(static_cast<std::size_t>(i) + k * stride) % g];
      Needle n{keys[k], values[k], depth, needle_offset(depth, config.context_len)};
      if (overlaps(t.needles, n.offset)) throw ConfigError("needle depths too close for this length");
      t.needles.push_back(n);
      plant(t.context, n);
      t.questions.push_back(question_for(n.key));
      t.answers.push_back(std::string(1, n.value));
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<std::string> gen_needle_documents(std::uint64_t seed, std::int64_t count,
                                              std::int64_t min_len, std::int64_t max_len,
                                              int max_needles, double decoy_rate) {
  if (min_len < 8 || max_len < min_len || max_needles < 1 || max_needles > 10) {
    throw ConfigError("needle documents need 8 <= min_len <= max_len and 1..10 needles");
  }
  if (!(decoy_rate >= 0.0 && decoy_rate < 1.0)) throw ConfigError("decoy_rate must lie in [0, 1)");
  // Keeps rejection sampling of non-overlapping offsets cheap.
  if (min_len < 6 * max_needles) throw ConfigError("needle documents need min_len >= 6 * max_needles");
  std::mt19937_64 rng(seed);
  std::vector<std::string> docs;
  for (std::int64_t i = 0; i < count; ++i) {
    const std::int64_t len = min_len + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_len - min_len + 1));
    std::string doc = haystack(rng(), len);
    if (decoy_rate > 0.0) {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      for (char& ch : doc) {
        if (ch != ' ' && coin(rng) < decoy_rate) ch = static_cast<char>('0' + rng() % 10);
      }
    }
    const std::size_t n = 1 + rng() % static_cast<std::uint64_t>(max_needles);
    const auto keys = distinct(rng, "ABCDEFGHIJKLMNOPQRSTUVWXYZ", n);
    const auto values = distinct(rng, "0123456789", n);
    std::vector<Needle> placed;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      Needle nd{keys[k], values[k], 0.0, 0};
      do {
        nd.depth = u(rng);
        nd.offset = needle_offset(nd.depth, len);
      } while (overlaps(placed, nd.offset));
      placed.push_back(nd);
      plant(doc, nd);
    }
    for (std::size_t k = placed.size(); k > 1; --k) std::swap(placed[k - 1], placed[rng() % k]);
    for (const Needle& nd : placed) {
      doc += question_for(nd.key);
      doc.push_back(nd.value);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

void write_tasks(const std::filesystem::path& path, const std::vector<NeedleTask>& tasks) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const NeedleTask& t : tasks) out << nlohmann::json(t).dump() << '\n';
}

std::vector<NeedleTask> read_tasks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<NeedleTask> tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      tasks.push_back(nlohmann::json::parse(line).get<NeedleTask>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return tasks;
}

NeedleScore score_needle(const std::vector<std::vector<std::string>>& outputs,
                         const std::vector<NeedleTask>& tasks) {
  if (outputs.size() != tasks.size()) {
    throw UsageError("score_needle: " + std::to_string(outputs.size()) + " outputs for " +
                     std::to_string(tasks.size()) + " tasks");
  }
  std::map<std::pair<std::int64_t, double>, CellScore> cells;
  NeedleScore score;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const NeedleTask& t = tasks[i];
    if (outputs[i].size() != t.answers.size()) {
      throw UsageError("score_needle: task " + std::to_string(t.id) + " has " +
                       std::to_string(outputs[i].size()) + " outputs for " +
                       std::to_string(t.answers.size()) + " questions");
    }
    for (std::size_t q = 0; q < t.answers.size(); ++q) {
      const bool hit = !t.answers[q].empty() && outputs[i][q].find(t.answers[q]) != std::string::npos;
      CellScore& cell = cells[{t.length, t.needles[q].depth}];
      cell.length = t.length;
      cell.depth = t.needles[q].depth;
      cell.correct += hit;
      ++cell.total;
      score.correct += hit;
      ++score.total;
    }
  }
  for (auto& [key, cell] : cells) score.cells.push_back(cell);
  return score;
}

double binomial_upper_tail(std::int64_t k, std::int64_t n, double p) {
  if (n < 0 || k < 0 || k > n || !(p >= 0.0 && p <= 1.0)) throw UsageError("invalid binomial tail query");
  if (k == 0) return 1.0;
  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), p);
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(k - 1)));
}

template <typename T>
std::vector<std::vector<std::string>> run_needle_eval(const ModelParams<T>& params,
                                                      const std::vector<NeedleTask>& tasks,
                                                      NeedleEvalOptions& options) {
  std::vector<std::vector<std::string>> outputs;
  options.chunks_encoded = 0;
  for (const NeedleTask& t : tasks) {
    const auto ctx = ByteTokenizer::encode(t.context);
    const CompressedCache<T> cache = compress_context(params, ctx, options.policy);
    options.chunks_encoded += cache.chunks_encoded;
    std::vector<std::string> answers;
    for (std::size_t q = 0; q < t.questions.size(); ++q) {
      const auto prompt = ByteTokenizer::encode(t.questions[q]);
      GenerateStats stats;
      const auto out = generate(params, cache, prompt, static_cast<int>(std::max<std::size_t>(1, t.answers[q].size())),
                                Sampling{}, options.policy, &stats);
      options.chunks_encoded += stats.chunks_encoded;
      answers.push_back(ByteTokenizer::decode(out));
    }
    outputs.push_back(std::move(answers));
  }
  return outputs;
}

template std::vector<std::vector<std::string>> run_needle_eval<float>(const ModelParams<float>&,
                                                                      const std::vector<NeedleTask>&,
                                                                      NeedleEvalOptions&);
template std::vector<std::vector<std::string>> run_needle_eval<double>(const ModelParams<double>&,
                                                                       const std::vector<NeedleTask>&,
                                                                       NeedleEvalOptions&);

}  // namespace beacon
