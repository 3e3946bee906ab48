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

// Straight-line reference forward pass in double precision. Loops only; no
// tape, no kernels. Shares nothing with the library beyond parameter structs.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "beacon/params.hpp"

namespace oracle {

using Row = std::vector<double>;
using Mat = std::vector<Row>;

template <typename T>
double at(const beacon::Tensor<T>& t, std::int64_t r, std::int64_t c) {
  return static_cast<double>(t.data[static_cast<std::size_t>(r * t.shape.back() + c)]);
}

template <typename T>
Row vec_mat(const Row& x, const beacon::Tensor<T>& w) {
  const std::int64_t n = w.shape[1];
  Row y(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::int64_t j = 0; j < n; ++j) y[j] += x[i] * at(w, static_cast<std::int64_t>(i), j);
  }
  return y;
}

template <typename T>
Row rms(const Row& x, const beacon::Tensor<T>& w, double eps) {
  double ss = 0;
  for (double v : x) ss += v * v;
  const double inv = 1.0 / std::sqrt(ss / static_cast<double>(x.size()) + eps);
  Row y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * inv * static_cast<double>(w.data[i]);
  return y;
}

inline Row rotate(const Row& x, std::int64_t pos, std::int64_t d, double base) {
  Row y = x;
  for (std::size_t h = 0; h * d < x.size(); ++h) {
    for (std::int64_t j = 0; j < d / 2; ++j) {
      const double ang = static_cast<double>(pos) * std::pow(base, -2.0 * j / static_cast<double>(d));
      const std::size_t a = h * d + 2 * j, b = a + 1;
      y[a] = x[a] * std::cos(ang) - x[b] * std::sin(ang);
      y[b] = x[a] * std::sin(ang) + x[b] * std::cos(ang);
    }
  }
  return y;
}

struct ChunkOut {
  Mat hidden;            // last layer, every row
  std::vector<Mat> k, v;  // per layer, unrotated, every row
};

// One chunk over cached (unrotated) keys/values. Rows whose id equals the
// beacon sentinel use the beacon embedding and projections.
template <typename T>
ChunkOut chunk(const beacon::ModelParams<T>& p, const std::vector<std::int32_t>& ids,
               const std::vector<Mat>& cache_k, const std::vector<Mat>& cache_v) {
  const auto& c = p.config;
  const std::int64_t D = c.hidden_size, d = c.head_dim, hq = c.query_heads, hk = c.kv_heads;
  const std::size_t n = ids.size();
  const std::int64_t m = cache_k.empty() ? 0 : static_cast<std::int64_t>(cache_k[0].size());
  auto is_b = [&](std::size_t i) { return ids[i] == c.beacon_token(); };

  Mat h(n, Row(static_cast<std::size_t>(D)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < D; ++j) {
      h[i][j] = is_b(i) ? static_cast<double>(p.beacon.embed.data[j]) : at(p.base.embed, ids[i], j);
    }
  }
  ChunkOut out;
  for (std::size_t l = 0; l < p.base.layers.size(); ++l) {
    const auto& w = p.base.layers[l];
    const auto& bw = p.beacon.layers[l];
    Mat q(n), k(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Row x = rms(h[i], w.attn_norm, c.norm_eps);
      q[i] = vec_mat(x, is_b(i) ? bw.wq : w.wq);
      k[i] = vec_mat(x, is_b(i) ? bw.wk : w.wk);
      v[i] = vec_mat(x, is_b(i) ? bw.wv : w.wv);
    }
    out.k.push_back(k);
    out.v.push_back(v);
    Mat keys, vals;
    for (std::int64_t j = 0; j < m; ++j) {
      keys.push_back(rotate(cache_k[l][j], j, d, c.rope_base));
      vals.push_back(cache_v[l][j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      keys.push_back(rotate(k[i], m + static_cast<std::int64_t>(i), d, c.rope_base));
      vals.push_back(v[i]);
    }
    Mat next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t qpos = m + static_cast<std::int64_t>(i);
      const Row qr = rotate(q[i], qpos, d, c.rope_base);
      Row attn(static_cast<std::size_t>(hq * d), 0.0);
      for (std::int64_t head = 0; head < hq; ++head) {
        const std::int64_t g = head / (hq / hk);
        std::vector<double> s(static_cast<std::size_t>(qpos + 1));
        double top = -std::numeric_limits<double>::infinity();
        for (std::int64_t j = 0; j <= qpos; ++j) {
          double dot = 0;
          for (std::int64_t e = 0; e < d; ++e) dot += qr[head * d + e] * keys[j][g * d + e];
          s[j] = dot / std::sqrt(static_cast<double>(d));
          top = std::max(top, s[j]);
        }
        double z = 0;
        for (double& x : s) z += (x = std::exp(x - top));
        for (std::int64_t j = 0; j <= qpos; ++j) {
          for (std::int64_t e = 0; e < d; ++e) attn[head * d + e] += s[j] / z * vals[j][g * d + e];
        }
      }
      Row x = h[i];
      const Row o = vec_mat(attn, w.wo);
      for (std::int64_t j = 0; j < D; ++j) x[j] += o[j];
      const Row xn = rms(x, w.mlp_norm, c.norm_eps);
      Row gate = vec_mat(xn, w.w_gate);
      const Row up = vec_mat(xn, w.w_up);
      for (std::size_t j = 0; j < gate.size(); ++j) gate[j] = gate[j] / (1.0 + std::exp(-gate[j])) * up[j];
      const Row dn = vec_mat(gate, w.w_down);
      for (std::int64_t j = 0; j < D; ++j) x[j] += dn[j];
      next[i] = x;
    }
    h = next;
  }
  out.hidden = h;
  return out;
}

template <typename T>
Row logits(const beacon::ModelParams<T>& p, const Row& hidden) {
  return vec_mat(rms(hidden, p.base.final_norm, p.config.norm_eps), p.base.lm_head);
}

// Vanilla logits for every row of a beacon-free sequence.
template <typename T>
Mat vanilla(const beacon::ModelParams<T>& p, const std::vector<std::int32_t>& ids) {
  ChunkOut o = chunk(p, ids, {}, {});
  Mat out;
  for (const Row& r : o.hidden) out.push_back(logits(p, r));
  return out;
}

// Appends the beacon rows of `o` to the per-layer cache.
inline void accumulate(const ChunkOut& o, const std::vector<std::int32_t>& ids, std::int32_t beacon,
                       std::vector<Mat>& ck, std::vector<Mat>& cv) {
  ck.resize(o.k.size());
  cv.resize(o.v.size());
  for (std::size_t l = 0; l < o.k.size(); ++l) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] != beacon) continue;
      ck[l].push_back(o.k[l][i]);
      cv[l].push_back(o.v[l][i]);
    }
  }
}

}  // namespace oracle
