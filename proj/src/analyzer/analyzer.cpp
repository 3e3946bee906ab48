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

#include "beacon/analyzer.hpp"

#include <algorithm>
#include <iomanip>

#include "beacon/errors.hpp"

namespace beacon {

namespace {

Flops F(std::int64_t v) { return Flops(static_cast<std::uint64_t>(v)); }

Flops mlp_rows(std::int64_t rows, const FlopsSpec& spec) {
  FlopsSpec s = spec;
  s.s = rows;
  return f_oth_terms(s).mlp();
}

Flops lm_rows(std::int64_t rows, const FlopsSpec& spec) {
  FlopsSpec s = spec;
  s.s = rows;
  return f_oth_terms(s).lm;
}

Flops att(std::int64_t s, std::int64_t s_pst, const FlopsSpec& spec) {
  FlopsSpec x = spec;
  x.s = s;
  x.s_pst = s_pst;
  return f_att(x);
}

}  // namespace

void FlopsSpec::validate() const {
  if (layers < 1 || hidden < 1 || query_heads < 1 || kv_heads < 1 || head_dim < 1 ||
      intermediate < 1 || vocab < 1 || chunk_size < 1 || alpha < 1) {
    throw ConfigError("FLOPs spec sizes must be positive");
  }
  if (s < 0 || s_pst < 0) throw ConfigError("FLOPs spec lengths must be non-negative");
}

AttentionFlops f_att_terms(const FlopsSpec& spec) {
  spec.validate();
  const Flops s = F(spec.s), all = F(spec.s + spec.s_pst);
  const Flops D = F(spec.hidden), d = F(spec.head_dim), hq = F(spec.query_heads), hk = F(spec.kv_heads);
  AttentionFlops a;
  a.qkv = 2 * s * D * d * hq + 2 * 2 * s * D * d * hk;
  a.qk = 2 * hq * s * all * d;
  a.softmax = spec.softmax == SoftmaxCount::kLiteral ? hq * all * all : hq * s * all;
  a.av = 2 * hq * s * all * d;
  a.out = 2 * s * d * hq * D;
  return a;
}

Flops f_att(const FlopsSpec& spec) { return f_att_terms(spec).total(); }

OtherFlops f_oth_terms(const FlopsSpec& spec) {
  spec.validate();
  const Flops s = F(spec.s), D = F(spec.hidden), I = F(spec.intermediate), V = F(spec.vocab);
  OtherFlops o;
  o.up = 2 * s * D * 2 * I;
  o.gate = s * I;
  o.down = 2 * s * D * I;
  o.lm = 2 * s * D * V;
  return o;
}

Flops f_oth(const FlopsSpec& spec) { return f_oth_terms(spec).total(); }

Flops flops_full(std::int64_t n, const FlopsSpec& spec) {
  if (n < 1) throw ConfigError("flops_full needs n >= 1");
  return F(spec.layers) * (att(n, 0, spec) + mlp_rows(n, spec)) + lm_rows(n, spec);
}

Flops flops_beacon(std::int64_t n, const FlopsSpec& spec) {
  if (n < 1) throw ConfigError("flops_beacon needs n >= 1");
  spec.validate();
  const std::int64_t w = spec.chunk_size, a = spec.alpha;
  Flops attention = 0;
  std::int64_t past = 0;
  for (std::int64_t start = 0; start < n; start += w) {
    const std::int64_t len = std::min(w, n - start);
    const std::int64_t k = (len + a - 1) / a;
    attention += att(len + k, past, spec);
    past += k;
  }
  const std::int64_t rows = n + past;
  return F(spec.layers) * (attention + mlp_rows(rows, spec)) + lm_rows(rows, spec);
}

KvEntries kv_cache_entries(std::int64_t n, std::int64_t w, int alpha, const std::vector<int>& ratio_set) {
  if (n < 1 || w < 1) throw ConfigError("kv_cache_entries needs n >= 1 and w >= 1");
  if (std::find(ratio_set.begin(), ratio_set.end(), alpha) == ratio_set.end()) {
    throw ConfigError("compression ratio " + std::to_string(alpha) + " is not in the ratio set");
  }
  KvEntries e;
  e.full = n;
  for (std::int64_t start = 0; start < n; start += w) {
    const std::int64_t len = std::min(w, n - start);
    e.beacon += (len + alpha - 1) / alpha;
  }
  return e;
}

std::vector<CurveRow> emit_curve(const FlopsSpec& spec, const std::vector<std::int64_t>& lengths,
                                 const std::vector<int>& ratios) {
  if (ratios.empty()) throw ConfigError("emit_curve needs at least one ratio");
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] < 1 || (i > 0 && lengths[i] <= lengths[i - 1])) {
      throw ConfigError("curve lengths must be positive and strictly ascending");
    }
  }
  std::vector<CurveRow> rows;
  for (std::int64_t n : lengths) {
    CurveRow row;
    row.n = n;
    row.full = flops_full(n, spec);
    for (int a : ratios) {
      FlopsSpec s = spec;
      s.alpha = a;
      row.beacon.push_back(flops_beacon(n, s));
      row.ratio.push_back(row.full.convert_to<double>() / row.beacon.back().convert_to<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows, const std::vector<int>& ratios) {
  out << "n,flops_full";
  for (int a : ratios) out << ",flops_beacon_x" << a;
  for (int a : ratios) out << ",ratio_x" << a;
  out << '\n';
  for (const CurveRow& r : rows) {
    out << r.n << ',' << to_string(r.full);
    for (const Flops& b : r.beacon) out << ',' << to_string(b);
    for (double x : r.ratio) out << ',' << std::setprecision(10) << x;
    out << '\n';
  }
}

FlopsSpec flops_preset(const std::string& name) {
  FlopsSpec s;
  s.chunk_size = 1024;
  s.alpha = 8;
  if (name == "llama2-7b") {
    s.layers = 32, s.hidden = 4096, s.query_heads = 32, s.kv_heads = 32, s.head_dim = 128;
    s.intermediate = 11008, s.vocab = 32000;
  } else if (name == "qwen2-7b") {
    s.layers = 28, s.hidden = 3584, s.query_heads = 28, s.kv_heads = 4, s.head_dim = 128;
    s.intermediate = 18944, s.vocab = 152064;
  } else if (name == "llama3-8b") {
    s.layers = 32, s.hidden = 4096, s.query_heads = 32, s.kv_heads = 8, s.head_dim = 128;
    s.intermediate = 14336, s.vocab = 128256;
  } else if (name == "desk") {
    s.layers = 4, s.hidden = 128, s.query_heads = 4, s.kv_heads = 2, s.head_dim = 32;
    s.intermediate = 512, s.vocab = 256, s.chunk_size = 64, s.alpha = 2;
  } else {
    throw ConfigError("unknown FLOPs preset \"" + name + "\"");
  }
  return s;
}

std::vector<std::string> flops_preset_names() { return {"llama2-7b", "qwen2-7b", "llama3-8b", "desk"}; }

std::string to_string(const Flops& f) { return f.str(); }

}  // namespace beacon
