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

#include "beacon/gradcheck.hpp"

#include <cmath>
#include <numeric>

namespace beacon {

GradCheckResult finite_diff_check(const std::function<double(const Tensor<double>&)>& f,
                                  const Tensor<double>& x, const Tensor<double>& analytic_grad,
                                  double epsilon, std::span<const std::size_t> coords) {
  if (analytic_grad.shape != x.shape) throw DimensionError("finite_diff_check: gradient shape mismatch");
  std::vector<std::size_t> all;
  if (coords.empty()) {
    all.resize(x.data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    coords = all;
  }
  GradCheckResult result;
  Tensor<double> probe = x;
  for (std::size_t i : coords) {
    if (i >= x.data.size()) throw DimensionError("finite_diff_check: coordinate out of range");
    const double orig = probe.data[i];
    probe.data[i] = orig + epsilon;
    const double up = f(probe);
    probe.data[i] = orig - epsilon;
    const double down = f(probe);
    probe.data[i] = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_diff_check: objective is not finite");
    }
    const double numeric = (up - down) / (2.0 * epsilon);
    const double g = analytic_grad.data[i];
    const double err = std::abs(numeric - g) / (std::abs(g) + epsilon);
    if (err > result.max_rel_error || result.checked == 0) {
      if (err > result.max_rel_error) result.worst_index = i;
      result.max_rel_error = std::max(result.max_rel_error, err);
    }
    ++result.checked;
  }
  return result;
}

GradCheckResult finite_diff_check(const std::function<Var(Tape<double>&, Var)>& build,
                                  const Tensor<double>& x, double epsilon,
                                  std::span<const std::size_t> coords) {
  Tensor<double> grad;
  {
    Tape<double> tape;
    Var xv = tape.leaf(x, true);
    Var out = build(tape, xv);
    tape.backward(out);
    grad = tape.grad(xv);
  }
  auto f = [&build](const Tensor<double>& probe) {
    Tape<double> tape;
    Var out = build(tape, tape.leaf(probe, false));
    return tape.value(out).data.at(0);
  };
  return finite_diff_check(f, x, grad, epsilon, coords);
}

}  // namespace beacon
