// Copyright 2026 The latentbridge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "latentbridge/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "latentbridge/numerics/kernels.hpp"
#include "latentbridge/numerics/tape.hpp"

namespace latentbridge::ops {

namespace {

using detail::TensorImpl;
using ImplPtr = std::shared_ptr<TensorImpl>;

[[noreturn]] void shape_mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_to_string(a.shape()) + " and " +
                   shape_to_string(b.shape()));
}

void require_rank(const char* op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " +
                     shape_to_string(t.shape()));
  }
}

ImplPtr new_impl(Shape shape) {
  auto impl = std::make_shared<TensorImpl>();
  impl->data.assign(shape_numel(shape), 0.0f);
  impl->shape = std::move(shape);
  return impl;
}

// Recording is needed only when a tape is active and some input tracks grads.
Tape* tape_for(std::initializer_list<const Tensor*> inputs) {
  Tape* tape = active_tape();
  if (!tape) return nullptr;
  for (const Tensor* t : inputs) {
    if (t->defined() && t->requires_grad()) return tape;
  }
  return nullptr;
}

TensorImpl* grad_target(const Tensor& t) {
  return t.defined() && t.requires_grad() ? t.impl().get() : nullptr;
}

std::size_t last_dim(const Tensor& t) { return t.shape().back(); }

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  if (a.dim(1) != b.dim(0)) shape_mismatch("matmul", a, b);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  auto out = new_impl({m, n});
  kernels::gemm_nn(a.data().data(), b.data().data(), out->data.data(), m, k, n);
  if (Tape* tape = tape_for({&a, &b})) {
    TensorImpl* ga = grad_target(a);
    TensorImpl* gb = grad_target(b);
    const TensorImpl* ai = a.impl().get();
    const TensorImpl* bi = b.impl().get();
    TensorImpl* oi = out.get();
    tape->record({a.impl(), b.impl()}, out, [=] {
      const float* dc = oi->grad.data();
      if (ga) kernels::gemm_nt(dc, bi->data.data(), ga->grad_buffer().data(), m, n, k);
      if (gb) kernels::gemm_tn(ai->data.data(), dc, gb->grad_buffer().data(), m, k, n);
    });
  }
  return make_tensor(out);
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_rank("matmul_nt", a, 2);
  require_rank("matmul_nt", b, 2);
  if (a.dim(1) != b.dim(1)) shape_mismatch("matmul_nt", a, b);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  auto out = new_impl({m, n});
  kernels::gemm_nt(a.data().data(), b.data().data(), out->data.data(), m, k, n);
  if (Tape* tape = tape_for({&a, &b})) {
    TensorImpl* ga = grad_target(a);
    TensorImpl* gb = grad_target(b);
    const TensorImpl* ai = a.impl().get();
    const TensorImpl* bi = b.impl().get();
    TensorImpl* oi = out.get();
    tape->record({a.impl(), b.impl()}, out, [=] {
      const float* dc = oi->grad.data();
      if (ga) kernels::gemm_nn(dc, bi->data.data(), ga->grad_buffer().data(), m, n, k);
      if (gb) kernels::gemm_tn(dc, ai->data.data(), gb->grad_buffer().data(), m, n, k);
    });
  }
  return make_tensor(out);
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_rank("linear", x, 2);
  require_rank("linear", w, 2);
  if (x.dim(1) != w.dim(0)) shape_mismatch("linear", x, w);
  const std::size_t n = x.dim(0), in = x.dim(1), outw = w.dim(1);
  if (b.defined() && (b.rank() != 1 || b.dim(0) != outw)) shape_mismatch("linear(bias)", w, b);
  auto out = new_impl({n, outw});
  if (b.defined()) {
    const float* bias = b.data().data();
    for (std::size_t i = 0; i < n; ++i) std::copy(bias, bias + outw, out->data.data() + i * outw);
  }
  kernels::gemm_nn(x.data().data(), w.data().data(), out->data.data(), n, in, outw);
  if (Tape* tape = tape_for({&x, &w, &b})) {
    TensorImpl* gx = grad_target(x);
    TensorImpl* gw = grad_target(w);
    TensorImpl* gb = grad_target(b);
    const TensorImpl* xi = x.impl().get();
    const TensorImpl* wi = w.impl().get();
    TensorImpl* oi = out.get();
    std::vector<ImplPtr> inputs{x.impl(), w.impl()};
    if (b.defined()) inputs.push_back(b.impl());
    tape->record(std::move(inputs), out, [=] {
      const float* dy = oi->grad.data();
      if (gx) kernels::gemm_nt(dy, wi->data.data(), gx->grad_buffer().data(), n, outw, in);
      if (gw) kernels::gemm_tn(xi->data.data(), dy, gw->grad_buffer().data(), n, in, outw);
      if (gb) {
        float* db = gb->grad_buffer().data();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < outw; ++j) db[j] += dy[i * outw + j];
        }
      }
    });
  }
  return make_tensor(out);
}

namespace {

enum class Elementwise { kAdd, kSub, kMul };

Tensor elementwise(const char* name, const Tensor& a, const Tensor& b, Elementwise kind) {
  if (a.shape() != b.shape()) shape_mismatch(name, a, b);
  auto out = new_impl(a.shape());
  const float* x = a.data().data();
  const float* y = b.data().data();
  float* z = out->data.data();
  const std::size_t n = out->data.size();
  switch (kind) {
    case Elementwise::kAdd:
      for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + y[i];
      break;
    case Elementwise::kSub:
      for (std::size_t i = 0; i < n; ++i) z[i] = x[i] - y[i];
      break;
    case Elementwise::kMul:
      for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
      break;
  }
  if (Tape* tape = tape_for({&a, &b})) {
    TensorImpl* ga = grad_target(a);
    TensorImpl* gb = grad_target(b);
    const TensorImpl* ai = a.impl().get();
    const TensorImpl* bi = b.impl().get();
    TensorImpl* oi = out.get();
    tape->record({a.impl(), b.impl()}, out, [=] {
      const float* dz = oi->grad.data();
      if (ga) {
        float* da = ga->grad_buffer().data();
        if (kind == Elementwise::kMul) {
          for (std::size_t i = 0; i < n; ++i) da[i] += dz[i] * bi->data[i];
        } else {
          for (std::size_t i = 0; i < n; ++i) da[i] += dz[i];
        }
      }
      if (gb) {
        float* db = gb->grad_buffer().data();
        if (kind == Elementwise::kMul) {
          for (std::size_t i = 0; i < n; ++i) db[i] += dz[i] * ai->data[i];
        } else if (kind == Elementwise::kSub) {
          for (std::size_t i = 0; i < n; ++i) db[i] -= dz[i];
        } else {
          for (std::size_t i = 0; i < n; ++i) db[i] += dz[i];
        }
      }
    });
  }
  return make_tensor(out);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return elementwise("add", a, b, Elementwise::kAdd); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise("sub", a, b, Elementwise::kSub); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise("mul", a, b, Elementwise::kMul); }

Tensor scale(const Tensor& a, float factor) {
  auto out = new_impl(a.shape());
  const auto x = a.data();
  for (std::size_t i = 0; i < x.size(); ++i) out->data[i] = x[i] * factor;
  if (Tape* tape = tape_for({&a})) {
    TensorImpl* ga = grad_target(a);
    TensorImpl* oi = out.get();
    tape->record({a.impl()}, out, [=] {
      float* da = ga->grad_buffer().data();
      for (std::size_t i = 0; i < oi->grad.size(); ++i) da[i] += oi->grad[i] * factor;
    });
  }
  return make_tensor(out);
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  Shape shape = parts[0].shape();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    if (p.rank() != shape.size() || !std::equal(shape.begin() + 1, shape.end(), p.shape().begin() + 1)) {
      shape_mismatch("concat_rows", parts[0], p);
    }
    rows += p.dim(0);
  }
  shape[0] = rows;
  auto out = new_impl(shape);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    std::copy(p.data().begin(), p.data().end(), out->data.begin() + static_cast<std::ptrdiff_t>(offset));
    offset += p.numel();
  }
  Tape* tape = active_tape();
  bool any = std::any_of(parts.begin(), parts.end(), [](const Tensor& t) { return t.requires_grad(); });
  if (tape && any) {
    std::vector<ImplPtr> inputs;
    std::vector<TensorImpl*> targets;
    std::vector<std::size_t> sizes;
    for (const auto& p : parts) {
      inputs.push_back(p.impl());
      targets.push_back(grad_target(p));
      sizes.push_back(p.numel());
    }
    TensorImpl* oi = out.get();
    tape->record(std::move(inputs), out, [=] {
      std::size_t off = 0;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i]) {
          float* d = targets[i]->grad_buffer().data();
          for (std::size_t j = 0; j < sizes[i]; ++j) d[j] += oi->grad[off + j];
        }
        off += sizes[i];
      }
    });
  }
  return make_tensor(out);
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  if (begin >= end || end > x.dim(0)) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") invalid for shape " + shape_to_string(x.shape()));
  }
  Shape shape = x.shape();
  const std::size_t row = x.numel() / shape[0];
  shape[0] = end - begin;
  auto out = new_impl(shape);
  std::copy(x.data().begin() + static_cast<std::ptrdiff_t>(begin * row),
            x.data().begin() + static_cast<std::ptrdiff_t>(end * row), out->data.begin());
  if (Tape* tape = tape_for({&x})) {
    TensorImpl* gx = grad_target(x);
    TensorImpl* oi = out.get();
    tape->record({x.impl()}, out, [=] {
      float* d = gx->grad_buffer().data() + begin * row;
      for (std::size_t j = 0; j < oi->grad.size(); ++j) d[j] += oi->grad[j];
    });
  }
  return make_tensor(out);
}

Tensor transpose(const Tensor& x) {
  require_rank("transpose", x, 2);
  const std::size_t r = x.dim(0), c = x.dim(1);
  auto out = new_impl({c, r});
  const auto src = x.data();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out->data[j * r + i] = src[i * c + j];
  }
  if (Tape* tape = tape_for({&x})) {
    TensorImpl* gx = grad_target(x);
    TensorImpl* oi = out.get();
    tape->record({x.impl()}, out, [=] {
      float* d = gx->grad_buffer().data();
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) d[i * c + j] += oi->grad[j * r + i];
      }
    });
  }
  return make_tensor(out);
}

Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> index) {
  require_rank("gather_rows", table, 2);
  if (index.empty()) throw ShapeError("gather_rows: empty index");
  const std::size_t rows = table.dim(0), width = table.dim(1);
  for (auto id : index) {
    if (id < 0 || static_cast<std::size_t>(id) >= rows) {
      throw ShapeError("gather_rows: index " + std::to_string(id) + " out of range for table " +
                       shape_to_string(table.shape()));
    }
  }
  auto out = new_impl({index.size(), width});
  const float* src = table.data().data();
  for (std::size_t i = 0; i < index.size(); ++i) {
    std::copy_n(src + static_cast<std::size_t>(index[i]) * width, width, out->data.data() + i * width);
  }
  if (Tape* tape = tape_for({&table})) {
    TensorImpl* gt = grad_target(table);
    TensorImpl* oi = out.get();
    std::vector<std::int32_t> ids(index.begin(), index.end());
    tape->record({table.impl()}, out, [=, ids = std::move(ids)] {
      float* d = gt->grad_buffer().data();
      for (std::size_t i = 0; i < ids.size(); ++i) {
        float* row = d + static_cast<std::size_t>(ids[i]) * width;
        const float* g = oi->grad.data() + i * width;
        for (std::size_t j = 0; j < width; ++j) row[j] += g[j];
      }
    });
  }
  return make_tensor(out);
}

Tensor softmax(const Tensor& x) {
  const std::size_t width = last_dim(x);
  const std::size_t rows = x.numel() / width;
  auto out = new_impl(x.shape());
  const float* src = x.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    kernels::softmax_row(src + r * width, out->data.data() + r * width, width);
  }
  if (Tape* tape = tape_for({&x})) {
    TensorImpl* gx = grad_target(x);
    TensorImpl* oi = out.get();
    tape->record({x.impl()}, out, [=] {
      float* d = gx->grad_buffer().data();
      for (std::size_t r = 0; r < rows; ++r) {
        const float* y = oi->data.data() + r * width;
        const float* dy = oi->grad.data() + r * width;
        float dot = 0.0f;
        for (std::size_t j = 0; j < width; ++j) dot += dy[j] * y[j];
        for (std::size_t j = 0; j < width; ++j) d[r * width + j] += y[j] * (dy[j] - dot);
      }
    });
  }
  return make_tensor(out);
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, float eps) {
  const std::size_t width = last_dim(x);
  if (gamma.rank() != 1 || gamma.dim(0) != width) shape_mismatch("layer_norm(gamma)", x, gamma);
  if (beta.rank() != 1 || beta.dim(0) != width) shape_mismatch("layer_norm(beta)", x, beta);
  const std::size_t rows = x.numel() / width;
  auto out = new_impl(x.shape());
  std::vector<float> xhat(x.numel());
  std::vector<float> rstd(rows);
  const float* src = x.data().data();
  const float* g = gamma.data().data();
  const float* b = beta.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const float* row = src + r * width;
    float mu = 0.0f;
    for (std::size_t j = 0; j < width; ++j) mu += row[j];
    mu /= static_cast<float>(width);
    float var = 0.0f;
    for (std::size_t j = 0; j < width; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<float>(width);
    const float inv = 1.0f / std::sqrt(var + eps);
    rstd[r] = inv;
    for (std::size_t j = 0; j < width; ++j) {
      const float h = (row[j] - mu) * inv;
      xhat[r * width + j] = h;
      out->data[r * width + j] = h * g[j] + b[j];
    }
  }
  if (Tape* tape = tape_for({&x, &gamma, &beta})) {
    TensorImpl* gx = grad_target(x);
    TensorImpl* gg = grad_target(gamma);
    TensorImpl* gbeta = grad_target(beta);
    const TensorImpl* gi = gamma.impl().get();
    TensorImpl* oi = out.get();
    tape->record({x.impl(), gamma.impl(), beta.impl()}, out,
                 [=, xhat = std::move(xhat), rstd = std::move(rstd)] {
                   const float* dy = oi->grad.data();
                   if (gg || gbeta) {
                     float* dg = gg ? gg->grad_buffer().data() : nullptr;
                     float* db = gbeta ? gbeta->grad_buffer().data() : nullptr;
                     for (std::size_t r = 0; r < rows; ++r) {
                       for (std::size_t j = 0; j < width; ++j) {
                         if (dg) dg[j] += dy[r * width + j] * xhat[r * width + j];
                         if (db) db[j] += dy[r * width + j];
                       }
                     }
                   }
                   if (gx) {
                     float* dx = gx->grad_buffer().data();
                     const float inv_w = 1.0f / static_cast<float>(width);
                     for (std::size_t r = 0; r < rows; ++r) {
                       float mean_d = 0.0f, mean_dx = 0.0f;
                       for (std::size_t j = 0; j < width; ++j) {
                         const float dh = dy[r * width + j] * gi->data[j];
                         mean_d += dh;
                         mean_dx += dh * xhat[r * width + j];
                       }
                       mean_d *= inv_w;
                       mean_dx *= inv_w;
                       for (std::size_t j = 0; j < width; ++j) {
                         const float dh = dy[r * width + j] * gi->data[j];
                         dx[r * width + j] += rstd[r] * (dh - mean_d - xhat[r * width + j] * mean_dx);
                       }
                     }
                   }
                 });
  }
  return make_tensor(out);
}

namespace {
constexpr float kGeluC = 0.7978845608028654f;  // sqrt(2/pi)
constexpr float kGeluA = 0.044715f;
}  // namespace

Tensor gelu(const Tensor& x) {
  auto out = new_impl(x.shape());
  const auto src = x.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const float v = src[i];
    out->data[i] = 0.5f * v * (1.0f + std::tanh(kGeluC * (v + kGeluA * v * v * v)));
  }
  if (Tape* tape = tape_for({&x})) {
    TensorImpl* gx = grad_target(x);
    const TensorImpl* xi = x.impl().get();
    TensorImpl* oi = out.get();
    tape->record({x.impl()}, out, [=] {
      float* d = gx->grad_buffer().data();
      for (std::size_t i = 0; i < oi->grad.size(); ++i) {
        const float v = xi->data[i];
        const float t = std::tanh(kGeluC * (v + kGeluA * v * v * v));
        const float dt = (1.0f - t * t) * kGeluC * (1.0f + 3.0f * kGeluA * v * v);
        d[i] += oi->grad[i] * (0.5f * (1.0f + t) + 0.5f * v * dt);
      }
    });
  }
  return make_tensor(out);
}

Tensor relu(const Tensor& x) {
  auto out = new_impl(x.shape());
  const auto src = x.data();
  for (std::size_t i = 0; i < src.size(); ++i) out->data[i] = src[i] > 0.0f ? src[i] : 0.0f;
  if (Tape* tape = tape_for({&x})) {
    TensorImpl* gx = grad_target(x);
    const TensorImpl* xi = x.impl().get();
    TensorImpl* oi = out.get();
    tape->record({x.impl()}, out, [=] {
      float* d = gx->grad_buffer().data();
      for (std::size_t i = 0; i < oi->grad.size(); ++i) {
        if (xi->data[i] > 0.0f) d[i] += oi->grad[i];
      }
    });
  }
  return make_tensor(out);
}

namespace {

Tensor reduce_all(const Tensor& x, float factor) {
  auto out = new_impl({1});
  double acc = 0.0;
  for (float v : x.data()) acc += v;
  out->data[0] = static_cast<float>(acc * factor);
  if (Tape* tape = tape_for({&x})) {
    TensorImpl* gx = grad_target(x);
    TensorImpl* oi = out.get();
    tape->record({x.impl()}, out, [=] {
      float* d = gx->grad_buffer().data();
      const float g = oi->grad[0] * factor;
      for (std::size_t i = 0; i < gx->data.size(); ++i) d[i] += g;
    });
  }
  return make_tensor(out);
}

}  // namespace

Tensor sum(const Tensor& x) { return reduce_all(x, 1.0f); }
Tensor mean(const Tensor& x) { return reduce_all(x, 1.0f / static_cast<float>(x.numel())); }

Tensor l2_norm_rows(const Tensor& x) {
  require_rank("l2_norm_rows", x, 2);
  const std::size_t rows = x.dim(0), width = x.dim(1);
  auto out = new_impl({rows});
  const float* src = x.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    out->data[r] = std::sqrt(kernels::dot(src + r * width, src + r * width, width));
  }
  if (Tape* tape = tape_for({&x})) {
    TensorImpl* gx = grad_target(x);
    const TensorImpl* xi = x.impl().get();
    TensorImpl* oi = out.get();
    tape->record({x.impl()}, out, [=] {
      float* d = gx->grad_buffer().data();
      for (std::size_t r = 0; r < rows; ++r) {
        const float n = oi->data[r];
        if (n <= 0.0f) continue;
        const float g = oi->grad[r] / n;
        for (std::size_t j = 0; j < width; ++j) d[r * width + j] += g * xi->data[r * width + j];
      }
    });
  }
  return make_tensor(out);
}

Tensor l2_normalize_rows(const Tensor& x) {
  require_rank("l2_normalize_rows", x, 2);
  const std::size_t rows = x.dim(0), width = x.dim(1);
  auto out = new_impl(x.shape());
  std::vector<float> norms(rows);
  const float* src = x.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const float n = std::max(std::sqrt(kernels::dot(src + r * width, src + r * width, width)), 1e-12f);
    norms[r] = n;
    for (std::size_t j = 0; j < width; ++j) out->data[r * width + j] = src[r * width + j] / n;
  }
  if (Tape* tape = tape_for({&x})) {
    TensorImpl* gx = grad_target(x);
    TensorImpl* oi = out.get();
    tape->record({x.impl()}, out, [=, norms = std::move(norms)] {
      float* d = gx->grad_buffer().data();
      for (std::size_t r = 0; r < rows; ++r) {
        const float* y = oi->data.data() + r * width;
        const float* dy = oi->grad.data() + r * width;
        const float proj = kernels::dot(y, dy, width);
        for (std::size_t j = 0; j < width; ++j) d[r * width + j] += (dy[j] - y[j] * proj) / norms[r];
      }
    });
  }
  return make_tensor(out);
}

Tensor cosine_similarity(const Tensor& a, const Tensor& b) {
  require_rank("cosine_similarity", a, 2);
  require_rank("cosine_similarity", b, 2);
  if (a.dim(1) != b.dim(1)) shape_mismatch("cosine_similarity", a, b);
  return matmul_nt(l2_normalize_rows(a), l2_normalize_rows(b));
}

Tensor cross_entropy(const Tensor& logits, std::span<const std::int32_t> targets,
                     std::span<const float> weights) {
  require_rank("cross_entropy", logits, 2);
  const std::size_t rows = logits.dim(0), width = logits.dim(1);
  if (targets.size() != rows || weights.size() != rows) {
    throw ShapeError("cross_entropy: logits " + shape_to_string(logits.shape()) + " vs " +
                     std::to_string(targets.size()) + " targets and " + std::to_string(weights.size()) +
                     " weights");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (weights[r] != 0.0f && (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= width)) {
      throw ShapeError("cross_entropy: target " + std::to_string(targets[r]) + " out of range for " +
                       std::to_string(width) + " classes");
    }
  }
  auto out = new_impl({1});
  const float* src = logits.data().data();
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (weights[r] == 0.0f) continue;
    const double lse = kernels::log_sum_exp(src + r * width, width);
    total += static_cast<double>(weights[r]) * (lse - src[r * width + static_cast<std::size_t>(targets[r])]);
  }
  out->data[0] = static_cast<float>(total);
  if (Tape* tape = tape_for({&logits})) {
    TensorImpl* gl = grad_target(logits);
    const TensorImpl* li = logits.impl().get();
    TensorImpl* oi = out.get();
    std::vector<std::int32_t> t(targets.begin(), targets.end());
    std::vector<float> w(weights.begin(), weights.end());
    tape->record({logits.impl()}, out, [=, t = std::move(t), w = std::move(w)] {
      float* d = gl->grad_buffer().data();
      std::vector<float> p(width);
      const float g = oi->grad[0];
      for (std::size_t r = 0; r < rows; ++r) {
        if (w[r] == 0.0f) continue;
        kernels::softmax_row(li->data.data() + r * width, p.data(), width);
        const float s = g * w[r];
        for (std::size_t j = 0; j < width; ++j) d[r * width + j] += s * p[j];
        d[r * width + static_cast<std::size_t>(t[r])] -= s;
      }
    });
  }
  return make_tensor(out);
}

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v, const AttentionLayout& layout) {
  require_rank("attention", q, 2);
  require_rank("attention", k, 2);
  require_rank("attention", v, 2);
  const std::size_t B = layout.batch, Tq = layout.query_len, Tk = layout.key_len, H = layout.heads;
  const std::size_t width = q.dim(1);
  if (k.shape() != v.shape()) shape_mismatch("attention(k,v)", k, v);
  if (k.dim(1) != width) shape_mismatch("attention(q,k)", q, k);
  if (q.dim(0) != B * Tq || k.dim(0) != B * Tk) {
    throw ShapeError("attention: q " + shape_to_string(q.shape()) + " and k " + shape_to_string(k.shape()) +
                     " do not match layout batch=" + std::to_string(B) + " query_len=" + std::to_string(Tq) +
                     " key_len=" + std::to_string(Tk));
  }
  if (H == 0 || width % H != 0) throw ShapeError("attention: width not divisible by heads");
  if (layout.causal && Tq != Tk) throw ShapeError("attention: causal masking requires query_len == key_len");
  if (layout.key_lengths.size() != B) throw ShapeError("attention: key_lengths size must equal batch");
  for (auto len : layout.key_lengths) {
    if (len == 0 || len > Tk) throw ShapeError("attention: key length out of range");
  }
  const std::size_t hd = width / H;
  const float scale = 1.0f / std::sqrt(static_cast<float>(hd));
  const bool causal = layout.causal;
  const std::vector<std::size_t> key_lengths = layout.key_lengths;

  auto out = new_impl({B * Tq, width});
  std::vector<float> probs(B * H * Tq * Tk, 0.0f);
  const float* qd = q.data().data();
  const float* kd = k.data().data();
  const float* vd = v.data().data();
  std::vector<float> scores(Tk);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t h = 0; h < H; ++h) {
      for (std::size_t i = 0; i < Tq; ++i) {
        const std::size_t n_keys = causal ? std::min(key_lengths[b], i + 1) : key_lengths[b];
        const float* qi = qd + (b * Tq + i) * width + h * hd;
        for (std::size_t j = 0; j < n_keys; ++j) {
          scores[j] = kernels::dot(qi, kd + (b * Tk + j) * width + h * hd, hd) * scale;
        }
        float* p = probs.data() + ((b * H + h) * Tq + i) * Tk;
        kernels::softmax_row(scores.data(), p, n_keys);
        float* o = out->data.data() + (b * Tq + i) * width + h * hd;
        for (std::size_t j = 0; j < n_keys; ++j) {
          kernels::axpy(p[j], vd + (b * Tk + j) * width + h * hd, o, hd);
        }
      }
    }
  }
  if (Tape* tape = tape_for({&q, &k, &v})) {
    TensorImpl* gq = grad_target(q);
    TensorImpl* gk = grad_target(k);
    TensorImpl* gv = grad_target(v);
    const TensorImpl* qi_ = q.impl().get();
    const TensorImpl* ki_ = k.impl().get();
    const TensorImpl* vi_ = v.impl().get();
    TensorImpl* oi = out.get();
    tape->record({q.impl(), k.impl(), v.impl()}, out, [=, probs = std::move(probs)] {
      const float* dout = oi->grad.data();
      float* dq = gq ? gq->grad_buffer().data() : nullptr;
      float* dk = gk ? gk->grad_buffer().data() : nullptr;
      float* dv = gv ? gv->grad_buffer().data() : nullptr;
      std::vector<float> dp(Tk);
      for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t h = 0; h < H; ++h) {
          for (std::size_t i = 0; i < Tq; ++i) {
            const std::size_t n_keys = causal ? std::min(key_lengths[b], i + 1) : key_lengths[b];
            const float* p = probs.data() + ((b * H + h) * Tq + i) * Tk;
            const float* doi = dout + (b * Tq + i) * width + h * hd;
            float weighted = 0.0f;
            for (std::size_t j = 0; j < n_keys; ++j) {
              const std::size_t kv_off = (b * Tk + j) * width + h * hd;
              dp[j] = kernels::dot(doi, vi_->data.data() + kv_off, hd);
              weighted += p[j] * dp[j];
              if (dv) kernels::axpy(p[j], doi, dv + kv_off, hd);
            }
            const std::size_t q_off = (b * Tq + i) * width + h * hd;
            for (std::size_t j = 0; j < n_keys; ++j) {
              const float ds = p[j] * (dp[j] - weighted) * scale;
              const std::size_t kv_off = (b * Tk + j) * width + h * hd;
              if (dq) kernels::axpy(ds, ki_->data.data() + kv_off, dq + q_off, hd);
              if (dk) kernels::axpy(ds, qi_->data.data() + q_off, dk + kv_off, hd);
            }
          }
        }
      }
    });
  }
  return make_tensor(out);
}

}  // namespace latentbridge::ops
