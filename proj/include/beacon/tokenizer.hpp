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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beacon {

// One token per byte. Id 0 (NUL) doubles as end-of-document.
class ByteTokenizer {
 public:
  static constexpr std::int32_t kEos = 0;
  static constexpr std::int64_t kVocabSize = 256;

  static std::vector<std::int32_t> encode(std::string_view text);
  // Ids outside [0, 256) are rendered as '?'; eos renders as nothing.
  static std::string decode(std::span<const std::int32_t> ids);
};

struct TrainExample {
  std::vector<std::int32_t> tokens;  // ends with eos
};

// Tokenizes, appends eos and keeps documents whose token count (before eos)
// lies in [min_len, max_len]. Order is a seeded shuffle. Throws DataError
// when nothing survives.
std::vector<TrainExample> prepare_corpus(const std::vector<std::string>& documents,
                                         std::int64_t min_len, std::int64_t max_len,
                                         std::uint64_t seed);

// A directory yields one document per regular file (sorted by name); a file
// yields one document per non-empty line.
std::vector<std::string> load_documents(const std::filesystem::path& path);

}  // namespace beacon
