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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "beacon/gradcheck.hpp"
#include "beacon/ops.hpp"
#include "doctest.h"

using namespace beacon;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Tensor<double> randn(Shape shape, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  Tensor<double> t(std::move(shape));
  for (auto& v : t.data) v = dist(rng);
  return t;
}

// Reduces any tensor to a scalar with a fixed random projection so that every
// output coordinate carries a distinct weight into the gradient.
Var project(Tape<double>& tape, Var y, std::uint64_t seed = 99) {
  Var w = tape.leaf(randn(tape.value(y).shape, seed));
  return ops::sum(tape, ops::mul(tape, y, w));
}

double check(const std::function<Var(Tape<double>&, Var)>& build, const Tensor<double>& x) {
  return finite_diff_check(build, x, 1e-6).max_rel_error;
}

}  // namespace

TEST_CASE("matmul examples") {
  Tape<double> tape;
  Var id = tape.leaf(Tensor<double>({2, 2}, {1, 0, 0, 1}));
  Var m = tape.leaf(Tensor<double>({2, 2}, {1, 2, 3, 4}));
  CHECK(tape.value(ops::matmul(tape, id, m)).data == std::vector<double>{1, 2, 3, 4});

  Var col = tape.leaf(Tensor<double>({2, 1}, {5, 6}));
  Var prod = ops::matmul(tape, m, col);
  CHECK(tape.value(prod).shape == Shape{2, 1});
  CHECK(tape.value(prod).data == std::vector<double>{17, 39});

  Var zero = tape.leaf(Tensor<double>({2, 2}));
  CHECK(tape.value(ops::matmul(tape, zero, m)).data == std::vector<double>(4, 0.0));

  Var bad = tape.leaf(Tensor<double>({3, 1}));
  CHECK_THROWS_AS(ops::matmul(tape, m, bad), DimensionError);
}

TEST_CASE("softmax_rows examples") {
  Tape<double> tape;
  Var a = tape.leaf(Tensor<double>({1, 2}, {0, 0}));
  CHECK(tape.value(ops::softmax_rows(tape, a)).data == std::vector<double>{0.5, 0.5});

  Var b = tape.leaf(Tensor<double>({1, 2}, {std::log(1.0), std::log(3.0)}));
  const auto& pb = tape.value(ops::softmax_rows(tape, b));
  CHECK(pb[0] == Approx(0.25).epsilon(1e-12));
  CHECK(pb[1] == Approx(0.75).epsilon(1e-12));

  Var c = tape.leaf(Tensor<double>({1, 2}, {5, 5}));
  const auto& pc = tape.value(ops::softmax_rows(tape, c, Tensor<double>({1, 2}, {0, -kInf})));
  CHECK(pc[0] == 1.0);
  CHECK(pc[1] == 0.0);

  CHECK_THROWS_AS(ops::softmax_rows(tape, c, Tensor<double>({1, 2}, {-kInf, -kInf})),
                  DegenerateRowError);
}

TEST_CASE("softmax rows sum to one and masked entries are exactly zero") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::int64_t rows = 1 + trial % 7, cols = 1 + (trial * 3) % 11;
    Tensor<float> x(Shape{rows, cols}), mask(Shape{rows, cols});
    std::normal_distribution<float> dist(0.f, 10.f);
    for (auto& v : x.data) v = dist(rng);
    for (std::int64_t r = 0; r < rows; ++r) {
      const auto keep = static_cast<std::int64_t>(rng() % cols);
      for (std::int64_t c = 0; c < cols; ++c) {
        if (c != keep && rng() % 3 == 0) mask.at(r, c) = -std::numeric_limits<float>::infinity();
      }
    }
    Tape<float> tape;
    const auto& y = tape.value(ops::softmax_rows(tape, tape.leaf(x), mask));
    for (std::int64_t r = 0; r < rows; ++r) {
      double s = 0;
      for (std::int64_t c = 0; c < cols; ++c) {
        s += y.at(r, c);
        CHECK(y.at(r, c) >= 0.f);
        if (std::isinf(mask.at(r, c))) CHECK(y.at(r, c) == 0.f);
      }
      CHECK(std::abs(s - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("rms_norm examples") {
  Tape<double> tape;
  Var ones = tape.leaf(Tensor<double>({1, 4}, {1, 1, 1, 1}));
  Var w4 = tape.leaf(Tensor<double>({4}, {1, 1, 1, 1}));
  for (double v : tape.value(ops::rms_norm(tape, ones, w4, 1e-12)).data) CHECK(v == Approx(1.0));

  Var x = tape.leaf(Tensor<double>({1, 2}, {3, 4}));
  Var w2 = tape.leaf(Tensor<double>({2}, {1, 1}));
  const auto& y = tape.value(ops::rms_norm(tape, x, w2, 1e-12));
  CHECK(y[0] == Approx(3.0 / std::sqrt(12.5)));
  CHECK(y[1] == Approx(4.0 / std::sqrt(12.5)));
  CHECK(y[0] == Approx(0.8485).epsilon(1e-4));
  CHECK(y[1] == Approx(1.1314).epsilon(1e-4));

  Var zw = tape.leaf(Tensor<double>({2}));
  CHECK(tape.value(ops::rms_norm(tape, x, zw, 1e-5)).data == std::vector<double>{0, 0});
  CHECK_THROWS_AS(ops::rms_norm(tape, x, w2, 0.0), ConfigError);
}

TEST_CASE("rope examples and properties") {
  Tape<double> tape;
  const Tensor<double> x = randn({3, 8}, 3);
  Var xv = tape.leaf(x);
  std::vector<std::int64_t> zeros{0, 0, 0};
  CHECK(tape.value(ops::rope(tape, xv, zeros, 4, 10000.0)).data == x.data);

  for (std::int64_t p : {1, 2, 7, 100}) {
    Var e = tape.leaf(Tensor<double>({1, 2}, {1, 0}));
    std::vector<std::int64_t> pos{p};
    const auto& r = tape.value(ops::rope(tape, e, pos, 2, 10000.0));
    CHECK(r[0] == Approx(std::cos(double(p))).epsilon(1e-12));
    CHECK(r[1] == Approx(std::sin(double(p))).epsilon(1e-12));
  }

  // q·k depends only on the position offset
  const Tensor<double> q = randn({1, 8}, 4), k = randn({1, 8}, 5);
  auto dot_at = [&](std::int64_t pq, std::int64_t pk) {
    Tape<double> t;
    std::vector<std::int64_t> a{pq}, b{pk};
    const auto& rq = t.value(ops::rope(t, t.leaf(q), a, 8, 10000.0));
    const auto& rk = t.value(ops::rope(t, t.leaf(k), b, 8, 10000.0));
    double s = 0;
    for (int i = 0; i < 8; ++i) s += rq[i] * rk[i];
    return s;
  };
  CHECK(dot_at(5, 5) == Approx(dot_at(0, 0)).epsilon(1e-12));
  CHECK(dot_at(9, 4) == Approx(dot_at(5, 0)).epsilon(1e-12));

  // norm preservation
  std::vector<std::int64_t> pos{3, 17, 1000};
  const auto& r = tape.value(ops::rope(tape, xv, pos, 4, 10000.0));
  for (std::int64_t row = 0; row < 3; ++row) {
    double a = 0, b = 0;
    for (std::int64_t c = 0; c < 8; ++c) {
      a += x.at(row, c) * x.at(row, c);
      b += r.at(row, c) * r.at(row, c);
    }
    CHECK(std::abs(std::sqrt(a) - std::sqrt(b)) <= 1e-6);
  }

  Var odd = tape.leaf(Tensor<double>({1, 3}));
  std::vector<std::int64_t> one{1};
  CHECK_THROWS_AS(ops::rope(tape, odd, one, 3, 10000.0), ConfigError);
}

TEST_CASE("cross_entropy examples") {
  Tape<double> tape;
  Var uniform = tape.leaf(Tensor<double>({3, 4}));
  std::vector<std::int32_t> labels{0, 3, 1};
  auto ce = ops::cross_entropy(tape, uniform, labels, -100);
  CHECK(ce.count == 3);
  CHECK(tape.value(ce.loss)[0] == Approx(std::log(4.0)));

  std::vector<std::int32_t> ignored{-100, -100, -100};
  auto none = ops::cross_entropy(tape, uniform, ignored, -100);
  CHECK(none.count == 0);
  CHECK(tape.value(none.loss)[0] == 0.0);

  Var two = tape.leaf(Tensor<double>({1, 2}, {0, std::log(3.0)}));
  std::vector<std::int32_t> one{1};
  CHECK(tape.value(ops::cross_entropy(tape, two, one, -100).loss)[0] ==
        Approx(-std::log(0.75)).epsilon(1e-12));
  CHECK(-std::log(0.75) == Approx(0.2877).epsilon(1e-4));

  std::vector<std::int32_t> bad{2};
  CHECK_THROWS_AS(ops::cross_entropy(tape, two, bad, -100), DataError);
}

TEST_CASE("backward basics") {
  Tape<double> tape;
  Var x = tape.leaf(randn({2, 3}, 1), true);
  Var y = tape.leaf(randn({2, 3}, 2), true);
  Var unused = tape.leaf(randn({4}, 3), true);
  Var s = ops::sum(tape, x);
  Var d = ops::sum(tape, ops::mul(tape, x, y));
  Var total = ops::add(tape, s, d);
  tape.backward(total);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(tape.grad(x)[i] == Approx(1.0 + tape.value(y)[i]));
    CHECK(tape.grad(y)[i] == Approx(tape.value(x)[i]));
  }
  CHECK(tape.grad(unused).data == std::vector<double>(4, 0.0));

  Tape<double> other;
  Var foreign = other.leaf(Tensor<double>::scalar(1.0), true);
  CHECK_THROWS_AS(tape.backward(foreign), UsageError);
  Var nonscalar = other.leaf(Tensor<double>({2}), true);
  CHECK_THROWS_AS(other.backward(nonscalar), UsageError);
}

TEST_CASE("finite_diff_check examples") {
  const Tensor<double> x = randn({5}, 8);
  auto half_sq = [](Tape<double>& t, Var v) { return ops::scale(t, ops::sum(t, ops::mul(t, v, v)), 0.5); };
  CHECK(check(half_sq, x) < 1e-8);

  auto sum_softmax = [](Tape<double>& t, Var v) {
    return ops::sum(t, ops::softmax_rows(t, v));
  };
  Tensor<double> row = x;
  row.shape = {1, 5};
  Tape<double> tape;
  Var v = tape.leaf(row, true);
  tape.backward(sum_softmax(tape, v));
  for (double g : tape.grad(v).data) CHECK(std::abs(g) < 1e-12);
  // g is exactly 0 here, so the relative error is pure round-off over ε²;
  // a wide step keeps it small.
  CHECK(finite_diff_check(sum_softmax, row, 1e-3).max_rel_error < 1e-8);

  auto blowup = [](Tape<double>& t, Var v) {
    return ops::scale(t, ops::sum(t, v), std::numeric_limits<double>::infinity());
  };
  CHECK_THROWS_AS(check(blowup, x), NumericError);
}

TEST_CASE("two-layer composite gradient matches finite differences") {
  const Tensor<double> w1 = randn({6, 8}, 21, 0.5), w2 = randn({8, 3}, 22, 0.5);
  const Tensor<double> input = randn({4, 6}, 23);
  std::vector<std::int32_t> labels{0, 2, 1, 2};
  auto loss = [&](Tape<double>& t, Var w1v, Var w2v) {
    Var h = ops::silu(t, ops::matmul(t, t.leaf(input), w1v));
    Var logits = ops::matmul(t, h, w2v);
    return ops::cross_entropy(t, logits, labels, -100).loss;
  };
  CHECK(check([&](Tape<double>& t, Var v) { return loss(t, v, t.leaf(w2)); }, w1) <= 1e-5);
  CHECK(check([&](Tape<double>& t, Var v) { return loss(t, t.leaf(w1), v); }, w2) <= 1e-5);
}

TEST_CASE("every primitive's gradient matches finite differences") {
  const Tensor<double> a = randn({3, 4}, 31), b = randn({4, 5}, 32), c = randn({3, 4}, 33);
  const Tensor<double> bt = randn({5, 4}, 34), w = randn({4}, 35);

  SUBCASE("matmul") {
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::matmul(t, v, t.leaf(b))); }, a) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::matmul(t, t.leaf(a), v)); }, b) <= 1e-5);
  }
  SUBCASE("matmul_bt") {
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::matmul_bt(t, v, t.leaf(bt))); }, a) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::matmul_bt(t, t.leaf(a), v)); }, bt) <= 1e-5);
  }
  SUBCASE("elementwise") {
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::add(t, v, t.leaf(c))); }, a) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::mul(t, v, t.leaf(c))); }, a) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::scale(t, v, -1.7)); }, a) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::silu(t, v)); }, a) <= 1e-5);
  }
  SUBCASE("softmax with mask") {
    Tensor<double> mask({3, 4});
    mask.at(0, 1) = mask.at(2, 0) = mask.at(2, 3) = -kInf;
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::softmax_rows(t, v, mask)); }, a) <= 1e-5);
  }
  SUBCASE("rms_norm") {
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::rms_norm(t, v, t.leaf(w), 1e-5)); }, a) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::rms_norm(t, t.leaf(a), v, 1e-5)); }, w) <= 1e-5);
  }
  SUBCASE("rope") {
    std::vector<std::int64_t> pos{0, 5, 11};
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::rope(t, v, pos, 2, 10000.0)); }, a) <= 1e-5);
  }
  SUBCASE("cross_entropy") {
    std::vector<std::int32_t> labels{1, -100, 3};
    CHECK(check([&](Tape<double>& t, Var v) { return ops::cross_entropy(t, v, labels, -100).loss; }, a) <= 1e-5);
  }
  SUBCASE("row and column plumbing") {
    std::vector<std::int64_t> rows{2, 0, 2};
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::gather_rows(t, v, rows)); }, a) <= 1e-5);
    const std::vector<bool> sel{false, true, true, false, true, false};
    const Tensor<double> other = randn({3, 4}, 36);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::merge_rows(t, v, t.leaf(other), sel)); }, a) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::repeat_row(t, v, 3)); }, w) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::concat_rows(t, {t.leaf(c), v, v})); }, a) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) { return project(t, ops::slice_cols(t, v, 1, 2)); }, a) <= 1e-5);
    CHECK(check([&](Tape<double>& t, Var v) {
            return project(t, ops::concat_cols(t, {ops::slice_cols(t, v, 2, 2), t.leaf(c), ops::slice_cols(t, v, 0, 2)}));
          }, a) <= 1e-5);
  }
}

TEST_CASE("ops are deterministic") {
  const Tensor<float> x = tensor_cast<float>(randn({16, 32}, 41));
  const Tensor<float> y = tensor_cast<float>(randn({32, 24}, 42));
  auto run = [&] {
    Tape<float> t;
    Var h = ops::silu(t, ops::matmul(t, t.leaf(x), t.leaf(y)));
    return t.value(ops::softmax_rows(t, h));
  };
  CHECK(run() == run());
}
