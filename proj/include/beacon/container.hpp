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
#include <string>
#include <vector>

#include "beacon/tensor.hpp"
#include "json.hpp"

// Binary container shared by checkpoints and cache snapshots.
//
//   offset 0   8 bytes   magic "BEACON\0\1"
//   offset 8   8 bytes   header length H, unsigned little-endian
//   offset 16  H bytes   UTF-8 JSON header:
//                          {"meta": {...},
//                           "tensors": [{"name", "dtype": "f32"|"f64",
//                                        "shape": [...], "offset", "nbytes"}]}
//   offset 16+H          tensor payloads, little-endian IEEE-754, row-major,
//                        "offset" counted from the start of this section
//
// The header is written with sorted keys so equal content yields equal bytes.

namespace beacon {

struct ContainerTensor {
  std::string name;
  std::string dtype;
  Shape shape;
  std::string bytes;
};

struct Container {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<ContainerTensor> tensors;

  const ContainerTensor& find(const std::string& name) const;
  bool contains(const std::string& name) const;
};

std::string serialize_container(const Container& c);
Container parse_container(const std::string& bytes);

void write_container(const std::filesystem::path& path, const Container& c);
Container read_container(const std::filesystem::path& path);

template <typename T>
ContainerTensor pack_tensor(const std::string& name, const Tensor<T>& t);

// Converts from the stored dtype when it differs from T.
template <typename T>
Tensor<T> unpack_tensor(const ContainerTensor& entry);

std::string file_sha256(const std::filesystem::path& path);

}  // namespace beacon
