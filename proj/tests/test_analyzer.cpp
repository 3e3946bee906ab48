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

#include <sstream>
#include <stdexcept>

#include "beacon/analyzer.hpp"
#include "beacon/compressor.hpp"
#include "beacon/errors.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace beacon;

namespace {

FlopsSpec tiny() {
  FlopsSpec s;
  s.layers = 2;
  s.hidden = 8;
  s.query_heads = 2;
  s.kv_heads = 1;
  s.head_dim = 4;
  s.intermediate = 16;
  s.vocab = 32;
  s.chunk_size = 4;
  s.alpha = 2;
  return s;
}

// Plain 64-bit transcription of the attention and MLP terms.
std::uint64_t att64(std::uint64_t s, std::uint64_t p, const FlopsSpec& f) {
  const std::uint64_t D = f.hidden, d = f.head_dim, hq = f.query_heads, hk = f.kv_heads;
  return 2 * s * D * d * hq + 4 * s * D * d * hk + 2 * hq * s * (s + p) * d + hq * (s + p) * (s + p) +
         2 * hq * s * (s + p) * d + 2 * s * d * hq * D;
}
std::uint64_t mlp64(std::uint64_t s, const FlopsSpec& f) {
  return 4 * s * f.hidden * f.intermediate + s * f.intermediate + 2 * s * f.hidden * f.intermediate;
}
std::uint64_t lm64(std::uint64_t s, const FlopsSpec& f) { return 2 * s * f.hidden * f.vocab; }

}  // namespace

TEST_CASE("attention terms") {
  FlopsSpec s = tiny();
  s.s = 4;
  s.s_pst = 2;
  const AttentionFlops a = f_att_terms(s);
  CHECK(a.qkv == 1024);
  CHECK(a.qk == 384);
  CHECK(a.softmax == 72);
  CHECK(a.av == 384);
  CHECK(a.out == 512);
  CHECK(f_att(s) == 2376);

  s.softmax = SoftmaxCount::kCorrected;
  CHECK(f_att_terms(s).softmax == 2 * 4 * 6);

  FlopsSpec z = tiny();
  z.s = 0;
  CHECK(f_att(z) == 0);

  FlopsSpec one = tiny(), two = tiny();
  one.s = 5;
  two.s = 10;
  CHECK(f_att_terms(two).qk == 4 * f_att_terms(one).qk);

  FlopsSpec bad = tiny();
  bad.hidden = 0;
  CHECK_THROWS_AS(f_att(bad), ConfigError);
  bad = tiny();
  bad.s_pst = -1;
  CHECK_THROWS_AS(f_att(bad), ConfigError);
}

TEST_CASE("other terms") {
  FlopsSpec s = tiny();
  s.s = 4;
  const OtherFlops o = f_oth_terms(s);
  CHECK(o.up == 2048);
  CHECK(o.gate == 64);
  CHECK(o.down == 1024);
  CHECK(o.lm == 2048);
  CHECK(f_oth(s) == 5184);
  FlopsSpec z = tiny();
  CHECK(f_oth(z) == 0);
  for (std::int64_t n : {1, 3, 17, 1000}) {
    FlopsSpec a = tiny(), b = tiny();
    a.s = n;
    b.s = 2 * n;
    CHECK(f_oth(b) == 2 * f_oth(a));
  }
}

TEST_CASE("full forward") {
  const FlopsSpec s = tiny();
  CHECK(flops_full(1, s) == 2916);
  CHECK(flops_full(1, s) == 2 * (att64(1, 0, s) + mlp64(1, s)) + lm64(1, s));
  // Second difference is constant: quadratic plus linear.
  const Flops d0 = flops_full(12, s) + flops_full(10, s) - 2 * flops_full(11, s);
  for (std::int64_t n = 11; n < 200; n += 7) {
    CHECK(flops_full(n + 2, s) + flops_full(n, s) - 2 * flops_full(n + 1, s) == d0);
  }
  const FlopsSpec big = flops_preset("llama2-7b");
  const double r1 = flops_full(1 << 20, big).convert_to<double>() / flops_full(1 << 19, big).convert_to<double>();
  CHECK(r1 > 3.0);
  CHECK_THROWS_AS(flops_full(0, s), ConfigError);
  CHECK_THROWS_AS(flops_full(std::int64_t{1} << 62, big), std::overflow_error);
}

TEST_CASE("beacon forward") {
  const FlopsSpec s = tiny();
  CHECK(flops_beacon(4, s) == 2 * (att64(6, 0, s) + mlp64(6, s)) + lm64(6, s));
  CHECK(flops_beacon(8, s) ==
        2 * (att64(6, 0, s) + att64(6, 2, s) + mlp64(12, s)) + lm64(12, s));
  // Short last chunk: 3 tokens take 2 beacons.
  CHECK(flops_beacon(7, s) ==
        2 * (att64(6, 0, s) + att64(5, 2, s) + mlp64(11, s)) + lm64(11, s));
  FlopsSpec e = s;
  e.alpha = 8;
  e.chunk_size = 8;
  CHECK(flops_beacon(32, e) != flops_full(32, e));
  CHECK_THROWS_AS(flops_beacon(0, s), ConfigError);
}

TEST_CASE("compression pays off on long inputs") {
  for (const char* name : {"llama2-7b", "qwen2-7b", "llama3-8b"}) {
    FlopsSpec s = flops_preset(name);
    const std::int64_t w = s.chunk_size;
    for (int a : {2, 4, 8, 16, 32}) {
      s.alpha = a;
      for (std::int64_t n = 32 * w; n <= 256 * w; n += 8 * w) {
        CHECK_MESSAGE(flops_beacon(n, s) < flops_full(n, s), name << " x" << a << " n=" << n);
      }
    }
    // Short inputs: two chunks at ratio 2 cost more than full attention, the
    // extra beacon rows outweighing the smaller attention.
    s.alpha = 2;
    CHECK(flops_beacon(2 * w, s) > flops_full(2 * w, s));
  }
}

TEST_CASE("reduction at long context") {
  FlopsSpec s = flops_preset("llama2-7b");
  const double r = flops_full(262144, s).convert_to<double>() / flops_beacon(262144, s).convert_to<double>();
  CHECK(r >= 4.0);
  std::vector<std::int64_t> grid;
  for (std::int64_t n = 8192; n <= 262144; n += 8192) grid.push_back(n);
  const auto rows = emit_curve(s, grid, {8});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].ratio[0] >= rows[i - 1].ratio[0]);
}

TEST_CASE("curves") {
  const FlopsSpec s = flops_preset("llama2-7b");
  const std::vector<int> ratios{2, 4, 8, 16, 32};
  std::vector<std::int64_t> grid;
  for (std::int64_t n = 1024; n <= 131072; n *= 2) grid.push_back(n);
  const auto rows = emit_curve(s, grid, ratios);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t a = 1; a < ratios.size(); ++a) CHECK(rows[i].beacon[a] < rows[i].beacon[a - 1]);
    if (i > 0) {
      for (std::size_t a = 0; a < ratios.size(); ++a) CHECK(rows[i].ratio[a] >= rows[i - 1].ratio[a]);
    }
  }
  const auto single = emit_curve(tiny(), {4}, {2});
  REQUIRE(single.size() == 1);
  std::ostringstream csv;
  write_curve_csv(csv, single, {2});
  const std::string text = csv.str();
  CHECK(text.rfind("n,flops_full,flops_beacon_x2,ratio_x2\n4,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK_THROWS_AS(emit_curve(tiny(), {8, 4}, {2}), ConfigError);
  CHECK_THROWS_AS(flops_preset("nope"), ConfigError);
}

TEST_CASE("cache entries") {
  const KvEntries e = kv_cache_entries(8192, 1024, 8);
  CHECK(e.full == 8192);
  CHECK(e.beacon == 1024);
  CHECK(kv_cache_entries(3 * 64 + 1, 64, 4).beacon == 3 * 16 + 1);
  CHECK_THROWS_AS(kv_cache_entries(10, 4, 1), ConfigError);

  const ModelConfig c = testutil::tiny_config();
  const auto p = init_params<float>(c, 1);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 60);
    const int alpha = c.ratio_set[rng() % c.ratio_set.size()];
    const auto cache = compress_context(p, testutil::random_tokens(static_cast<std::size_t>(n), c.vocab_size, rng()),
                                        RatioPolicy::constant(alpha));
    CHECK(cache.m == kv_cache_entries(n, c.chunk_size, alpha, c.ratio_set).beacon);
  }
}
