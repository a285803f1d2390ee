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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "latentbridge/numerics/tensor.hpp"

// Differentiable tensor operations. Every function checks shapes, computes the
// forward value, and, when an input requires gradients and a tape is active,
// records its backward rule.
namespace latentbridge::ops {

// [m,k] x [k,n] -> [m,n]
Tensor matmul(const Tensor& a, const Tensor& b);
// [m,k] x [n,k]^T -> [m,n]
Tensor matmul_nt(const Tensor& a, const Tensor& b);
// x[n,in] * w[in,out] + b[out]; bias may be undefined.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, float factor);

Tensor concat_rows(std::span<const Tensor> parts);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);
Tensor transpose(const Tensor& x);

// Row gather: out[i] = table[index[i]]. Also serves as embedding lookup.
Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> index);

Tensor softmax(const Tensor& x);  // over the last axis
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  float eps = 1e-5f);
Tensor gelu(const Tensor& x);
Tensor relu(const Tensor& x);

Tensor sum(const Tensor& x);   // -> [1]
Tensor mean(const Tensor& x);  // -> [1]

Tensor l2_norm_rows(const Tensor& x);       // [n,d] -> [n]
Tensor l2_normalize_rows(const Tensor& x);  // [n,d] -> [n,d], unit rows
// Cosine-similarity matrix between the rows of a [n,d] and b [m,d].
Tensor cosine_similarity(const Tensor& a, const Tensor& b);

// Weighted negative log-likelihood of targets under softmax(logits), using a
// stable log-sum-exp: sum_i weight[i] * -log p(target[i] | logits[i]).
// Rows with weight 0 are skipped entirely.
Tensor cross_entropy(const Tensor& logits, std::span<const std::int32_t> targets,
                     std::span<const float> weights);

// Layout for batched multi-head scaled dot-product attention. Queries are
// packed as [batch * query_len, width], keys and values as
// [batch * key_len, width]. Keys at or beyond key_lengths[b] are masked.
struct AttentionLayout {
  std::size_t batch = 0;
  std::size_t query_len = 0;
  std::size_t key_len = 0;
  std::size_t heads = 1;
  bool causal = false;
  std::vector<std::size_t> key_lengths;
};

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v,
                 const AttentionLayout& layout);

}  // namespace latentbridge::ops
