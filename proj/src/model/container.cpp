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

#include "beacon/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "beacon/config.hpp"
#include "beacon/errors.hpp"

namespace beacon {

static_assert(std::endian::native == std::endian::little,
              "container I/O copies tensor memory directly and assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'B', 'E', 'A', 'C', 'O', 'N', '\0', '\1'};

template <typename T>
constexpr const char* dtype_name() {
  return sizeof(T) == 4 ? "f32" : "f64";
}

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "f32") return 4;
  if (dtype == "f64") return 8;
  throw DataError("unsupported tensor dtype '" + dtype + "'");
}

}  // namespace

const ContainerTensor& Container::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw DataError("container has no tensor named '" + name + "'");
}

bool Container::contains(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return true;
  }
  return false;
}

std::string serialize_container(const Container& c) {
  nlohmann::json index = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& t : c.tensors) {
    index.push_back({{"name", t.name},
                     {"dtype", t.dtype},
                     {"shape", t.shape},
                     {"offset", offset},
                     {"nbytes", t.bytes.size()}});
    offset += t.bytes.size();
  }
  const std::string header = nlohmann::json{{"meta", c.meta}, {"tensors", index}}.dump();
  std::string out(kMagic, sizeof(kMagic));
  const std::uint64_t len = header.size();
  out.append(reinterpret_cast<const char*>(&len), sizeof(len));
  out += header;
  for (const auto& t : c.tensors) out += t.bytes;
  return out;
}

Container parse_container(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a beacon container (bad magic)");
  }
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data() + 8, sizeof(len));
  if (len > bytes.size() - 16) throw DataError("container header length exceeds file size");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(16, len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("container header is not valid JSON: ") + e.what());
  }
  const std::size_t data_start = 16 + len;
  Container c;
  c.meta = header.value("meta", nlohmann::json::object());
  for (const auto& entry : header.at("tensors")) {
    ContainerTensor t;
    t.name = entry.at("name").get<std::string>();
    t.dtype = entry.at("dtype").get<std::string>();
    t.shape = entry.at("shape").get<Shape>();
    const auto offset = entry.at("offset").get<std::uint64_t>();
    const auto nbytes = entry.at("nbytes").get<std::uint64_t>();
    if (nbytes != static_cast<std::uint64_t>(shape_numel(t.shape)) * dtype_size(t.dtype)) {
      throw DataError("tensor '" + t.name + "' byte count does not match its shape");
    }
    if (data_start + offset + nbytes > bytes.size()) {
      throw DataError("tensor '" + t.name + "' extends past the end of the file");
    }
    t.bytes = bytes.substr(data_start + offset, nbytes);
    c.tensors.push_back(std::move(t));
  }
  return c;
}

void write_container(const std::filesystem::path& path, const Container& c) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  const std::string bytes = serialize_container(c);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

namespace {
std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

Container read_container(const std::filesystem::path& path) {
  return parse_container(slurp(path));
}

std::string file_sha256(const std::filesystem::path& path) {
  return sha256_hex(slurp(path));
}

template <typename T>
ContainerTensor pack_tensor(const std::string& name, const Tensor<T>& t) {
  ContainerTensor e;
  e.name = name;
  e.dtype = dtype_name<T>();
  e.shape = t.shape;
  e.bytes.assign(reinterpret_cast<const char*>(t.data.data()), t.data.size() * sizeof(T));
  return e;
}

template <typename T>
Tensor<T> unpack_tensor(const ContainerTensor& entry) {
  const std::size_t count = static_cast<std::size_t>(shape_numel(entry.shape));
  Tensor<T> out(entry.shape);
  if (entry.dtype == "f32") {
    std::vector<float> tmp(count);
    std::memcpy(tmp.data(), entry.bytes.data(), count * sizeof(float));
    out.data.assign(tmp.begin(), tmp.end());
  } else if (entry.dtype == "f64") {
    std::vector<double> tmp(count);
    std::memcpy(tmp.data(), entry.bytes.data(), count * sizeof(double));
    out.data.assign(tmp.begin(), tmp.end());
  } else {
    throw DataError("unsupported tensor dtype '" + entry.dtype + "'");
  }
  return out;
}

template ContainerTensor pack_tensor<float>(const std::string&, const Tensor<float>&);
template ContainerTensor pack_tensor<double>(const std::string&, const Tensor<double>&);
template Tensor<float> unpack_tensor<float>(const ContainerTensor&);
template Tensor<double> unpack_tensor<double>(const ContainerTensor&);

}  // namespace beacon
