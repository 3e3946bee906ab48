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

#include <ostream>
#include <string>
#include <vector>

namespace beacon::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;    // unexpected failure
inline constexpr int kUsage = 2;      // bad flags or API misuse
inline constexpr int kConfig = 3;     // invalid configuration
inline constexpr int kData = 4;       // unreadable or malformed input
inline constexpr int kState = 5;      // snapshot/model mismatch
inline constexpr int kNumeric = 6;    // training diverged

// Runs one verb. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace beacon::cli
