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

#include "beacon/ops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "beacon/kernels.hpp"

namespace beacon::ops {
namespace {

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (a.shape != b.shape) {
    throw DimensionError(std::string(op) + ": shapes " + shape_to_string(a.shape) + " and " +
                         shape_to_string(b.shape) + " differ");
  }
}

template <typename T>
void add_into(Tensor<T>& dst, const Tensor<T>& src) {
  for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}

}  // namespace

template <typename T>
Var matmul(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& av = tape.value(a);
  const Tensor<T>& bv = tape.value(b);
  const std::int64_t m = av.rows(), k = av.cols(), n = bv.cols();
  if (bv.rows() != k) {
    throw DimensionError("matmul: inner dimensions " + shape_to_string(av.shape) + " x " +
                         shape_to_string(bv.shape));
  }
  Tensor<T> out(Shape{m, n});
  kernels::gemm_nn<T>(av.data, bv.data, out.data, m, k, n);
  return tape.record(std::move(out), {a, b},
                     [a, b, m, k, n](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       if (t.requires_grad(a)) {
                         kernels::gemm_nt<T>(g.data, t.value(b).data, t.grad_buffer(a).data, m,
                                             n, k, true);
                       }
                       if (t.requires_grad(b)) {
                         kernels::gemm_tn<T>(t.value(a).data, g.data, t.grad_buffer(b).data, m,
                                             k, n, true);
                       }
                     });
}

template <typename T>
Var matmul_bt(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& av = tape.value(a);
  const Tensor<T>& bv = tape.value(b);
  const std::int64_t m = av.rows(), k = av.cols(), n = bv.rows();
  if (bv.cols() != k) {
    throw DimensionError("matmul_bt: inner dimensions " + shape_to_string(av.shape) + " x " +
                         shape_to_string(bv.shape) + "ᵀ");
  }
  Tensor<T> out(Shape{m, n});
  kernels::gemm_nt<T>(av.data, bv.data, out.data, m, k, n);
  return tape.record(std::move(out), {a, b},
                     [a, b, m, k, n](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       if (t.requires_grad(a)) {
                         kernels::gemm_nn<T>(g.data, t.value(b).data, t.grad_buffer(a).data, m,
                                             n, k, true);
                       }
                       if (t.requires_grad(b)) {
                         kernels::gemm_tn<T>(g.data, t.value(a).data, t.grad_buffer(b).data, m,
                                             n, k, true);
                       }
                     });
}

template <typename T>
Var add(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& av = tape.value(a);
  const Tensor<T>& bv = tape.value(b);
  require_same_shape(av, bv, "add");
  Tensor<T> out = av;
  add_into(out, bv);
  return tape.record(std::move(out), {a, b},
                     [a, b](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       if (t.requires_grad(a)) add_into(t.grad_buffer(a), g);
                       if (t.requires_grad(b)) add_into(t.grad_buffer(b), g);
                     });
}

template <typename T>
Var mul(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& av = tape.value(a);
  const Tensor<T>& bv = tape.value(b);
  require_same_shape(av, bv, "mul");
  Tensor<T> out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= bv.data[i];
  return tape.record(std::move(out), {a, b},
                     [a, b](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       if (t.requires_grad(a)) {
                         auto& ga = t.grad_buffer(a);
                         const auto& bv = t.value(b);
                         for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] * bv.data[i];
                       }
                       if (t.requires_grad(b)) {
                         auto& gb = t.grad_buffer(b);
                         const auto& av = t.value(a);
                         for (std::size_t i = 0; i < g.data.size(); ++i) gb.data[i] += g.data[i] * av.data[i];
                       }
                     });
}

template <typename T>
Var scale(Tape<T>& tape, Var a, T factor) {
  Tensor<T> out = tape.value(a);
  for (T& v : out.data) v *= factor;
  return tape.record(std::move(out), {a},
                     [a, factor](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       auto& ga = t.grad_buffer(a);
                       for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i] * factor;
                     });
}

template <typename T>
Var silu(Tape<T>& tape, Var a) {
  Tensor<T> out = tape.value(a);
  for (T& v : out.data) v = v / (T{1} + std::exp(-v));
  return tape.record(std::move(out), {a},
                     [a](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       auto& ga = t.grad_buffer(a);
                       const auto& x = t.value(a);
                       for (std::size_t i = 0; i < g.data.size(); ++i) {
                         const T s = T{1} / (T{1} + std::exp(-x.data[i]));
                         ga.data[i] += g.data[i] * s * (T{1} + x.data[i] * (T{1} - s));
                       }
                     });
}

template <typename T>
Var sum(Tape<T>& tape, Var a) {
  T total = 0;
  for (T v : tape.value(a).data) total += v;
  return tape.record(Tensor<T>::scalar(total), {a},
                     [a](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       auto& ga = t.grad_buffer(a);
                       for (T& v : ga.data) v += g.data[0];
                     });
}

template <typename T>
Var softmax_rows(Tape<T>& tape, Var x, const Tensor<T>& mask) {
  const Tensor<T>& xv = tape.value(x);
  if (!mask.empty()) require_same_shape(xv, mask, "softmax_rows mask");
  const std::int64_t rows = xv.rows(), cols = xv.cols();
  Tensor<T> out(xv.shape);
  kernels::softmax_rows<T>(xv.data, mask.data, out.data, rows, cols);
  return tape.record(std::move(out), {x},
                     [x, rows, cols](Tape<T>& t, const Tensor<T>& y, const Tensor<T>& g) {
                       auto& gx = t.grad_buffer(x);
                       for (std::int64_t r = 0; r < rows; ++r) {
                         const T* yr = y.data.data() + r * cols;
                         const T* gr = g.data.data() + r * cols;
                         T dot = 0;
                         for (std::int64_t j = 0; j < cols; ++j) dot += yr[j] * gr[j];
                         T* out = gx.data.data() + r * cols;
                         for (std::int64_t j = 0; j < cols; ++j) out[j] += yr[j] * (gr[j] - dot);
                       }
                     });
}

template <typename T>
Var rms_norm(Tape<T>& tape, Var x, Var weight, T eps) {
  if (!(eps > T{0})) throw ConfigError("rms_norm: eps must be positive");
  const Tensor<T>& xv = tape.value(x);
  const Tensor<T>& wv = tape.value(weight);
  const std::int64_t cols = xv.shape.empty() ? 1 : xv.shape.back();
  if (wv.numel() != cols) {
    throw DimensionError("rms_norm: weight length " + std::to_string(wv.numel()) +
                         " does not match feature size " + std::to_string(cols));
  }
  const std::int64_t n_rows = xv.numel() / cols;
  Tensor<T> out(xv.shape);
  Tensor<T> inv_rms(Shape{n_rows});
  kernels::rms_norm_rows<T>(xv.data, wv.data, out.data, inv_rms.data, n_rows, cols, eps);
  return tape.record(
      std::move(out), {x, weight},
      [x, weight, n_rows, cols, inv = std::move(inv_rms)](Tape<T>& t, const Tensor<T>&,
                                                          const Tensor<T>& g) {
        const auto& xv = t.value(x);
        const auto& wv = t.value(weight);
        const bool need_x = t.requires_grad(x);
        const bool need_w = t.requires_grad(weight);
        Tensor<T>* gx = need_x ? &t.grad_buffer(x) : nullptr;
        Tensor<T>* gw = need_w ? &t.grad_buffer(weight) : nullptr;
        for (std::int64_t r = 0; r < n_rows; ++r) {
          const T* xr = xv.data.data() + r * cols;
          const T* gr = g.data.data() + r * cols;
          const T ir = inv.data[static_cast<std::size_t>(r)];
          if (gw) {
            for (std::int64_t j = 0; j < cols; ++j) gw->data[j] += gr[j] * xr[j] * ir;
          }
          if (gx) {
            T dot = 0;
            for (std::int64_t j = 0; j < cols; ++j) dot += gr[j] * wv.data[j] * xr[j];
            const T coeff = ir * ir * ir * dot / static_cast<T>(cols);
            T* out = gx->data.data() + r * cols;
            for (std::int64_t j = 0; j < cols; ++j) out[j] += ir * gr[j] * wv.data[j] - coeff * xr[j];
          }
        }
      });
}

namespace {

// Rotates each adjacent pair of every head in place; sign = -1 undoes it.
template <typename T>
void rotate_pairs(Tensor<T>& x, std::span<const std::int64_t> positions, std::int64_t head_dim,
                  double base, double sign) {
  const std::int64_t rows = x.rows(), cols = x.cols();
  const std::int64_t heads = cols / head_dim;
  const std::int64_t half = head_dim / 2;
  std::vector<double> inv_freq(static_cast<std::size_t>(half));
  for (std::int64_t j = 0; j < half; ++j) {
    inv_freq[j] = std::pow(base, -2.0 * static_cast<double>(j) / static_cast<double>(head_dim));
  }
  for (std::int64_t r = 0; r < rows; ++r) {
    const double pos = static_cast<double>(positions[static_cast<std::size_t>(r)]);
    T* row = x.data.data() + r * cols;
    for (std::int64_t j = 0; j < half; ++j) {
      const double angle = pos * inv_freq[j];
      const T c = static_cast<T>(std::cos(angle));
      const T s = static_cast<T>(sign * std::sin(angle));
      for (std::int64_t h = 0; h < heads; ++h) {
        T* pair = row + h * head_dim + 2 * j;
        const T x0 = pair[0], x1 = pair[1];
        pair[0] = x0 * c - x1 * s;
        pair[1] = x0 * s + x1 * c;
      }
    }
  }
}

}  // namespace

template <typename T>
Var rope(Tape<T>& tape, Var x, std::span<const std::int64_t> positions, std::int64_t head_dim,
         double base) {
  const Tensor<T>& xv = tape.value(x);
  if (head_dim <= 0 || head_dim % 2 != 0) {
    throw ConfigError("rope: head_dim must be positive and even, got " + std::to_string(head_dim));
  }
  if (xv.cols() % head_dim != 0) throw DimensionError("rope: row size is not a multiple of head_dim");
  if (static_cast<std::int64_t>(positions.size()) != xv.rows()) {
    throw DimensionError("rope: one position per row required");
  }
  for (std::int64_t p : positions) {
    if (p < 0) throw DataError("rope: negative position");
  }
  Tensor<T> out = xv;
  rotate_pairs(out, positions, head_dim, base, 1.0);
  std::vector<std::int64_t> pos(positions.begin(), positions.end());
  return tape.record(std::move(out), {x},
                     [x, pos = std::move(pos), head_dim, base](Tape<T>& t, const Tensor<T>&,
                                                               const Tensor<T>& g) {
                       Tensor<T> back = g;
                       rotate_pairs(back, pos, head_dim, base, -1.0);
                       add_into(t.grad_buffer(x), back);
                     });
}

template <typename T>
CrossEntropy cross_entropy(Tape<T>& tape, Var logits, std::span<const std::int32_t> labels,
                           std::int32_t ignore_label) {
  const Tensor<T>& lv = tape.value(logits);
  const std::int64_t rows = lv.rows(), vocab = lv.cols();
  if (static_cast<std::int64_t>(labels.size()) != rows) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(rows) + " rows");
  }
  std::int64_t count = 0;
  for (std::int32_t l : labels) {
    if (l == ignore_label) continue;
    if (l < 0 || l >= vocab) throw DataError("cross_entropy: label " + std::to_string(l) + " out of range");
    ++count;
  }
  if (count == 0) return {tape.leaf(Tensor<T>::scalar(T{0})), 0};

  // Softmax probabilities are kept for the backward pass.
  Tensor<T> probs(Shape{rows, vocab});
  kernels::softmax_rows<T>(lv.data, {}, probs.data, rows, vocab);
  T total = 0;
  for (std::int64_t r = 0; r < rows; ++r) {
    const std::int32_t l = labels[static_cast<std::size_t>(r)];
    if (l == ignore_label) continue;
    // log p computed from logits directly for accuracy.
    const T* lr = lv.data.data() + r * vocab;
    T max_v = -std::numeric_limits<T>::infinity();
    for (std::int64_t j = 0; j < vocab; ++j) max_v = std::max(max_v, lr[j]);
    T s = 0;
    for (std::int64_t j = 0; j < vocab; ++j) s += std::exp(lr[j] - max_v);
    total += std::log(s) + max_v - lr[l];
  }
  const T inv_count = T{1} / static_cast<T>(count);
  std::vector<std::int32_t> lab(labels.begin(), labels.end());
  Var loss = tape.record(
      Tensor<T>::scalar(total * inv_count), {logits},
      [logits, rows, vocab, ignore_label, inv_count, lab = std::move(lab),
       probs = std::move(probs)](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
        auto& gl = t.grad_buffer(logits);
        const T scale_by = g.data[0] * inv_count;
        for (std::int64_t r = 0; r < rows; ++r) {
          const std::int32_t l = lab[static_cast<std::size_t>(r)];
          if (l == ignore_label) continue;
          const T* pr = probs.data.data() + r * vocab;
          T* out = gl.data.data() + r * vocab;
          for (std::int64_t j = 0; j < vocab; ++j) out[j] += scale_by * pr[j];
          out[l] -= scale_by;
        }
      });
  return {loss, count};
}

template <typename T>
Var gather_rows(Tape<T>& tape, Var x, std::span<const std::int64_t> rows) {
  const Tensor<T>& xv = tape.value(x);
  const std::int64_t cols = xv.cols();
  Tensor<T> out(Shape{static_cast<std::int64_t>(rows.size()), cols});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= xv.rows()) throw DataError("gather_rows: row index out of range");
    std::copy_n(xv.data.begin() + rows[i] * cols, cols, out.data.begin() + static_cast<std::int64_t>(i) * cols);
  }
  std::vector<std::int64_t> idx(rows.begin(), rows.end());
  return tape.record(std::move(out), {x},
                     [x, cols, idx = std::move(idx)](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       auto& gx = t.grad_buffer(x);
                       for (std::size_t i = 0; i < idx.size(); ++i) {
                         const T* src = g.data.data() + static_cast<std::int64_t>(i) * cols;
                         T* dst = gx.data.data() + idx[i] * cols;
                         for (std::int64_t j = 0; j < cols; ++j) dst[j] += src[j];
                       }
                     });
}

template <typename T>
Var merge_rows(Tape<T>& tape, Var a, Var b, const std::vector<bool>& take_second) {
  const Tensor<T>& av = tape.value(a);
  const Tensor<T>& bv = tape.value(b);
  const std::int64_t cols = av.empty() ? bv.cols() : av.cols();
  std::int64_t na = 0, nb = 0;
  for (bool s : take_second) (s ? nb : na) += 1;
  if ((!av.empty() && av.rows() != na) || (!bv.empty() && bv.rows() != nb) ||
      (av.empty() && na != 0) || (bv.empty() && nb != 0) ||
      (!av.empty() && !bv.empty() && av.cols() != bv.cols())) {
    throw DimensionError("merge_rows: row counts do not match the selection mask");
  }
  const std::int64_t total = static_cast<std::int64_t>(take_second.size());
  Tensor<T> out(Shape{total, cols});
  std::int64_t ia = 0, ib = 0;
  for (std::int64_t r = 0; r < total; ++r) {
    const T* src = take_second[r] ? bv.data.data() + (ib++) * cols : av.data.data() + (ia++) * cols;
    std::copy_n(src, cols, out.data.begin() + r * cols);
  }
  std::vector<bool> sel = take_second;
  return tape.record(std::move(out), {a, b},
                     [a, b, cols, sel = std::move(sel)](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       Tensor<T>* ga = t.requires_grad(a) ? &t.grad_buffer(a) : nullptr;
                       Tensor<T>* gb = t.requires_grad(b) ? &t.grad_buffer(b) : nullptr;
                       std::int64_t ia = 0, ib = 0;
                       for (std::size_t r = 0; r < sel.size(); ++r) {
                         const T* src = g.data.data() + static_cast<std::int64_t>(r) * cols;
                         Tensor<T>* dst = sel[r] ? gb : ga;
                         const std::int64_t row = sel[r] ? ib++ : ia++;
                         if (!dst) continue;
                         T* out = dst->data.data() + row * cols;
                         for (std::int64_t j = 0; j < cols; ++j) out[j] += src[j];
                       }
                     });
}

template <typename T>
Var repeat_row(Tape<T>& tape, Var row, std::int64_t count) {
  const Tensor<T>& rv = tape.value(row);
  const std::int64_t cols = rv.numel();
  Tensor<T> out(Shape{count, cols});
  for (std::int64_t r = 0; r < count; ++r) std::copy(rv.data.begin(), rv.data.end(), out.data.begin() + r * cols);
  return tape.record(std::move(out), {row},
                     [row, count, cols](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       auto& gr = t.grad_buffer(row);
                       for (std::int64_t r = 0; r < count; ++r) {
                         for (std::int64_t j = 0; j < cols; ++j) gr.data[j] += g.data[r * cols + j];
                       }
                     });
}

template <typename T>
Var concat_rows(Tape<T>& tape, const std::vector<Var>& parts) {
  if (parts.empty()) throw UsageError("concat_rows: nothing to concatenate");
  std::int64_t cols = -1, rows = 0;
  std::vector<std::int64_t> offsets;
  for (const Var& p : parts) {
    const Tensor<T>& v = tape.value(p);
    offsets.push_back(rows);
    if (v.empty()) continue;
    if (cols >= 0 && v.cols() != cols) throw DimensionError("concat_rows: column counts differ");
    cols = v.cols();
    rows += v.rows();
  }
  if (cols < 0) cols = 0;
  Tensor<T> out(Shape{rows, cols});
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Tensor<T>& v = tape.value(parts[i]);
    std::copy(v.data.begin(), v.data.end(), out.data.begin() + offsets[i] * cols);
  }
  return tape.record(std::move(out), parts,
                     [parts, offsets, cols](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       for (std::size_t i = 0; i < parts.size(); ++i) {
                         if (!t.requires_grad(parts[i]) || t.value(parts[i]).empty()) continue;
                         auto& gp = t.grad_buffer(parts[i]);
                         const T* src = g.data.data() + offsets[i] * cols;
                         for (std::size_t j = 0; j < gp.data.size(); ++j) gp.data[j] += src[j];
                       }
                     });
}

template <typename T>
Var slice_cols(Tape<T>& tape, Var x, std::int64_t start, std::int64_t width) {
  const Tensor<T>& xv = tape.value(x);
  const std::int64_t rows = xv.rows(), cols = xv.cols();
  if (start < 0 || width < 0 || start + width > cols) throw DimensionError("slice_cols: range out of bounds");
  Tensor<T> out(Shape{rows, width});
  for (std::int64_t r = 0; r < rows; ++r) {
    std::copy_n(xv.data.begin() + r * cols + start, width, out.data.begin() + r * width);
  }
  return tape.record(std::move(out), {x},
                     [x, rows, cols, start, width](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       auto& gx = t.grad_buffer(x);
                       for (std::int64_t r = 0; r < rows; ++r) {
                         for (std::int64_t j = 0; j < width; ++j) gx.data[r * cols + start + j] += g.data[r * width + j];
                       }
                     });
}

template <typename T>
Var concat_cols(Tape<T>& tape, const std::vector<Var>& parts) {
  if (parts.empty()) throw UsageError("concat_cols: nothing to concatenate");
  const std::int64_t rows = tape.value(parts.front()).rows();
  std::int64_t cols = 0;
  std::vector<std::int64_t> widths;
  for (const Var& p : parts) {
    const Tensor<T>& v = tape.value(p);
    if (v.rows() != rows) throw DimensionError("concat_cols: row counts differ");
    widths.push_back(v.cols());
    cols += v.cols();
  }
  Tensor<T> out(Shape{rows, cols});
  std::int64_t off = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Tensor<T>& v = tape.value(parts[i]);
    for (std::int64_t r = 0; r < rows; ++r) {
      std::copy_n(v.data.begin() + r * widths[i], widths[i], out.data.begin() + r * cols + off);
    }
    off += widths[i];
  }
  return tape.record(std::move(out), parts,
                     [parts, widths, rows, cols](Tape<T>& t, const Tensor<T>&, const Tensor<T>& g) {
                       std::int64_t off = 0;
                       for (std::size_t i = 0; i < parts.size(); ++i) {
                         if (t.requires_grad(parts[i])) {
                           auto& gp = t.grad_buffer(parts[i]);
                           for (std::int64_t r = 0; r < rows; ++r) {
                             for (std::int64_t j = 0; j < widths[i]; ++j) {
                               gp.data[r * widths[i] + j] += g.data[r * cols + off + j];
                             }
                           }
                         }
                         off += widths[i];
                       }
                     });
}

#define BEACON_INSTANTIATE_OPS(T)                                                              \
  template Var matmul<T>(Tape<T>&, Var, Var);                                                  \
  template Var matmul_bt<T>(Tape<T>&, Var, Var);                                               \
  template Var add<T>(Tape<T>&, Var, Var);                                                     \
  template Var mul<T>(Tape<T>&, Var, Var);                                                     \
  template Var scale<T>(Tape<T>&, Var, T);                                                     \
  template Var silu<T>(Tape<T>&, Var);                                                         \
  template Var sum<T>(Tape<T>&, Var);                                                          \
  template Var softmax_rows<T>(Tape<T>&, Var, const Tensor<T>&);                               \
  template Var rms_norm<T>(Tape<T>&, Var, Var, T);                                             \
  template Var rope<T>(Tape<T>&, Var, std::span<const std::int64_t>, std::int64_t, double);    \
  template CrossEntropy cross_entropy<T>(Tape<T>&, Var, std::span<const std::int32_t>,         \
                                         std::int32_t);                                        \
  template Var gather_rows<T>(Tape<T>&, Var, std::span<const std::int64_t>);                   \
  template Var merge_rows<T>(Tape<T>&, Var, Var, const std::vector<bool>&);                       \
  template Var repeat_row<T>(Tape<T>&, Var, std::int64_t);                                     \
  template Var concat_rows<T>(Tape<T>&, const std::vector<Var>&);                              \
  template Var slice_cols<T>(Tape<T>&, Var, std::int64_t, std::int64_t);                       \
  template Var concat_cols<T>(Tape<T>&, const std::vector<Var>&);

BEACON_INSTANTIATE_OPS(float)
BEACON_INSTANTIATE_OPS(double)

}  // namespace beacon::ops
