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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "beacon/tape.hpp"

namespace beacon {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Central finite differences against an analytic gradient:
//   max_i |(f(x+εe_i) - f(x-εe_i))/2ε - g_i| / (|g_i| + ε)
// over the listed coordinates (all coordinates when the list is empty).
// Throws NumericError when f returns a non-finite value.
GradCheckResult finite_diff_check(const std::function<double(const Tensor<double>&)>& f,
                                  const Tensor<double>& x, const Tensor<double>& analytic_grad,
                                  double epsilon, std::span<const std::size_t> coords = {});

// Convenience form: builds f on a fresh tape, runs backward to get the
// analytic gradient of x, then checks it.
GradCheckResult finite_diff_check(const std::function<Var(Tape<double>&, Var)>& build,
                                  const Tensor<double>& x, double epsilon,
                                  std::span<const std::size_t> coords = {});

}  // namespace beacon
