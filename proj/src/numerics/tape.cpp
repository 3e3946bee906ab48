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

#include "beacon/tape.hpp"

#include <atomic>
#include <sstream>

namespace beacon {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ']';
  return out.str();
}

namespace {
std::atomic<std::uint64_t> next_tape_serial{1};
}

template <typename T>
Tape<T>::Tape() : serial_(next_tape_serial.fetch_add(1)) {}

template <typename T>
Var Tape<T>::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{serial_, static_cast<std::int32_t>(nodes_.size() - 1)};
}

template <typename T>
Var Tape<T>::leaf(Tensor<T> value, bool requires_grad) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = requires_grad;
  n.is_leaf = true;
  return push(std::move(n));
}

template <typename T>
Var Tape<T>::borrow(const Tensor<T>& value, bool requires_grad) {
  Node n;
  n.external = &value;
  n.requires_grad = requires_grad;
  n.is_leaf = true;
  return push(std::move(n));
}

template <typename T>
Var Tape<T>::record(Tensor<T> value, std::initializer_list<Var> parents, BackwardFn fn) {
  return record(std::move(value), std::vector<Var>(parents), std::move(fn));
}

template <typename T>
Var Tape<T>::record(Tensor<T> value, const std::vector<Var>& parents, BackwardFn fn) {
  Node n;
  n.owned = std::move(value);
  for (const Var& p : parents) {
    if (!owns(p)) throw UsageError("op input is not recorded on this tape");
    n.requires_grad = n.requires_grad || nodes_[static_cast<std::size_t>(p.id)].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

template <typename T>
const typename Tape<T>::Node& Tape<T>::node(Var v) const {
  if (!owns(v)) throw UsageError("variable does not belong to this tape");
  return nodes_[static_cast<std::size_t>(v.id)];
}

template <typename T>
typename Tape<T>::Node& Tape<T>::node(Var v) {
  if (!owns(v)) throw UsageError("variable does not belong to this tape");
  return nodes_[static_cast<std::size_t>(v.id)];
}

template <typename T>
const Tensor<T>& Tape<T>::value(Var v) const {
  return node(v).value();
}

template <typename T>
bool Tape<T>::requires_grad(Var v) const {
  return node(v).requires_grad;
}

template <typename T>
const Tensor<T>& Tape<T>::grad(Var v) const {
  const Node& n = node(v);
  if (!backward_done_) throw UsageError("gradients requested before backward()");
  if (!n.is_leaf) throw UsageError("gradients are retained for leaves only");
  return n.grad;
}

template <typename T>
Tensor<T>& Tape<T>::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.grad.shape != n.value().shape || n.grad.data.size() != n.value().data.size()) {
    n.grad = Tensor<T>(n.value().shape);
  }
  return n.grad;
}

template <typename T>
void Tape<T>::backward(Var loss) {
  if (!owns(loss)) throw UsageError("loss is not recorded on this tape");
  if (backward_done_) throw UsageError("backward() already ran on this tape");
  Node& root = node(loss);
  if (root.value().numel() != 1) throw UsageError("backward() needs a scalar loss");
  grad_buffer(loss).data[0] = T{1};
  for (std::int32_t i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf || !n.backward || n.grad.empty()) continue;
    n.backward(*this, n.value(), n.grad);
    // Interior gradients are not needed once propagated.
    n.grad = Tensor<T>();
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    Node& n = nodes_[i];
    if (n.is_leaf && n.requires_grad && n.grad.numel() != n.value().numel()) {
      n.grad = Tensor<T>(n.value().shape);
    }
  }
  backward_done_ = true;
}

template class Tape<float>;
template class Tape<double>;

}  // namespace beacon
