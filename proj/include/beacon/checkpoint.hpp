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

#include <filesystem>

#include "beacon/container.hpp"
#include "beacon/params.hpp"

namespace beacon {

// Checkpoint = container with meta {"format": "beacon-checkpoint", "config",
// "config_hash", "base_hash", "beacon_hash", ...extra} and every base/beacon
// tensor under its "base." or "beacon." name.
template <typename T>
Container checkpoint_container(const ModelParams<T>& params,
                               const nlohmann::json& extra_meta = nlohmann::json::object());

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ModelParams<T>& params,
                     const nlohmann::json& extra_meta = nlohmann::json::object());

template <typename T>
ModelParams<T> params_from_container(const Container& c);

template <typename T>
ModelParams<T> load_checkpoint(const std::filesystem::path& path);

}  // namespace beacon
