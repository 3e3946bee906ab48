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

#include "beacon/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "beacon/errors.hpp"

namespace beacon {

std::vector<std::int32_t> ByteTokenizer::encode(std::string_view text) {
  std::vector<std::int32_t> ids;
  ids.reserve(text.size());
  for (char ch : text) ids.push_back(static_cast<std::int32_t>(static_cast<unsigned char>(ch)));
  return ids;
}

std::string ByteTokenizer::decode(std::span<const std::int32_t> ids) {
  std::string out;
  out.reserve(ids.size());
  for (std::int32_t id : ids) {
    if (id == kEos) continue;
    out.push_back(id > 0 && id < kVocabSize ? static_cast<char>(id) : '?');
  }
  return out;
}

std::vector<TrainExample> prepare_corpus(const std::vector<std::string>& documents,
                                         std::int64_t min_len, std::int64_t max_len,
                                         std::uint64_t seed) {
  if (min_len < 0 || max_len < min_len) throw ConfigError("corpus filter needs 0 <= min <= max");
  std::vector<TrainExample> out;
  for (const std::string& doc : documents) {
    const auto len = static_cast<std::int64_t>(doc.size());
    if (len < min_len || len > max_len) continue;
    TrainExample ex{ByteTokenizer::encode(doc)};
    ex.tokens.push_back(ByteTokenizer::kEos);
    out.push_back(std::move(ex));
  }
  if (out.empty()) throw DataError("corpus is empty after length filtering");
  std::mt19937_64 rng(seed);
  for (std::size_t i = out.size(); i > 1; --i) {
    std::swap(out[i - 1], out[static_cast<std::size_t>(rng() % i)]);
  }
  return out;
}

std::vector<std::string> load_documents(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<std::string> docs;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) docs.push_back(slurp(f));
  } else if (fs::is_regular_file(path)) {
    std::istringstream lines(slurp(path));
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty()) docs.push_back(line);
    }
  } else {
    throw DataError("corpus path not found: " + path.string());
  }
  return docs;
}

}  // namespace beacon
