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
#include <deque>
#include <functional>
#include <initializer_list>
#include <vector>

#include "beacon/tensor.hpp"

namespace beacon {

// Handle to a value recorded on a Tape. Carries the owning tape's serial so
// that mixing tapes is caught instead of silently reading the wrong node.
struct Var {
  std::uint64_t tape = 0;
  std::int32_t id = -1;

  bool valid() const { return id >= 0; }
};

// Reverse-mode tape. Nodes are appended in execution order, so walking the
// vector backwards is a reverse topological order.
//
// A tape belongs to one thread of execution. Values recorded on it stay alive
// until the tape is destroyed.
template <typename T>
class Tape {
 public:
  // Called during backward with the node's output value and its gradient. It
  // must accumulate into grad_buffer() of the node's parents.
  using BackwardFn =
      std::function<void(Tape&, const Tensor<T>& out_value, const Tensor<T>& out_grad)>;

  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) noexcept = default;
  Tape& operator=(Tape&&) noexcept = default;

  Var leaf(Tensor<T> value, bool requires_grad = false);

  // Records a leaf that refers to caller-owned storage without copying it.
  // The tensor must outlive the tape and stay unmodified while it is in use.
  Var borrow(const Tensor<T>& value, bool requires_grad = false);

  // Records an op result. The backward function is dropped when no parent
  // requires a gradient.
  Var record(Tensor<T> value, std::initializer_list<Var> parents, BackwardFn fn);
  Var record(Tensor<T> value, const std::vector<Var>& parents, BackwardFn fn);

  const Tensor<T>& value(Var v) const;
  bool requires_grad(Var v) const;

  // Gradient after backward(). Leaves that were not reached report zeros.
  const Tensor<T>& grad(Var v) const;

  // Zero-initialised on first access. For use inside BackwardFn.
  Tensor<T>& grad_buffer(Var v);

  void backward(Var loss);

  bool owns(Var v) const { return v.tape == serial_ && v.id >= 0 && v.id < size(); }
  std::int32_t size() const { return static_cast<std::int32_t>(nodes_.size()); }
  std::uint64_t serial() const { return serial_; }

 private:
  struct Node {
    Tensor<T> owned;
    const Tensor<T>* external = nullptr;
    Tensor<T> grad;
    BackwardFn backward;
    bool requires_grad = false;
    bool is_leaf = false;

    const Tensor<T>& value() const { return external ? *external : owned; }
  };

  const Node& node(Var v) const;
  Node& node(Var v);
  Var push(Node n);

  std::uint64_t serial_;
  std::deque<Node> nodes_;  // deque keeps value() references stable across records
  bool backward_done_ = false;
};

}  // namespace beacon
