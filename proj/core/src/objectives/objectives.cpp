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

#include "latentbridge/objectives/objectives.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "latentbridge/numerics/ops.hpp"
#include "latentbridge/numerics/random.hpp"
#include "latentbridge/numerics/tape.hpp"

namespace latentbridge {
namespace {

void require_pair(const char* op, const Tensor& s, const Tensor& d) {
  if (s.rank() != 2 || s.shape() != d.shape()) {
    throw ObjectiveError(std::string(op) + ": batch shapes " + shape_to_string(s.shape()) + " and " +
                         shape_to_string(d.shape()) + " do not pair");
  }
}

void require_unit_rows(const char* op, const Tensor& x) {
  const std::size_t n = x.dim(0), dim = x.dim(1);
  auto data = x.data();
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) sq += double(data[i * dim + j]) * data[i * dim + j];
    if (std::fabs(std::sqrt(sq) - 1.0) > 1e-3) {
      throw ObjectiveError(std::string(op) + ": row " + std::to_string(i) + " has norm " +
                           std::to_string(std::sqrt(sq)) + ", expected unit norm");
    }
  }
}

}  // namespace

void LossWeights::validate() const {
  if (!(lambda1 >= 0.0f && lambda1 <= 1.0f) || !(lambda2 >= 0.0f && lambda2 <= 1.0f)) {
    throw ObjectiveError("loss weights must lie in [0, 1]");
  }
  if (!(tau > 0.0f)) throw ObjectiveError("temperature must be positive");
}

Tensor info_nce(const Tensor& s, const Tensor& d, float tau) {
  require_pair("info_nce", s, d);
  if (!(tau > 0.0f)) throw ObjectiveError("info_nce: temperature must be positive");
  require_unit_rows("info_nce", s);
  require_unit_rows("info_nce", d);
  const std::size_t k = s.dim(0);
  std::vector<std::int32_t> diag(k);
  for (std::size_t i = 0; i < k; ++i) diag[i] = static_cast<std::int32_t>(i);
  const std::vector<float> weights(k, 1.0f / static_cast<float>(k));
  Tensor s_to_d = ops::cross_entropy(ops::scale(ops::matmul_nt(s, d), 1.0f / tau), diag, weights);
  Tensor d_to_s = ops::cross_entropy(ops::scale(ops::matmul_nt(d, s), 1.0f / tau), diag, weights);
  return ops::scale(ops::add(s_to_d, d_to_s), 0.5f);
}

Tensor mse(const Tensor& s, const Tensor& d) {
  require_pair("mse", s, d);
  Tensor diff = ops::sub(s, d);
  return ops::scale(ops::sum(ops::mul(diff, diff)), 0.5f / static_cast<float>(s.dim(0)));
}

Tensor cda_loss(const Tensor& s, const Tensor& d, const LossWeights& w) {
  w.validate();
  require_pair("cda_loss", s, d);
  Tensor total;
  if (w.lambda1 > 0.0f) total = ops::scale(info_nce(s, d, w.tau), w.lambda1);
  if (w.lambda2 > 0.0f) {
    Tensor m = ops::scale(mse(s, d), w.lambda2);
    total = total.defined() ? ops::add(total, m) : m;
  }
  if (!total.defined()) throw ObjectiveError("cda_loss: both loss weights are zero");
  return total;
}

LatentCoordinate perturb_coordinate(const LatentCoordinate& c, float eps, std::uint64_t seed, bool renormalize) {
  if (!(eps >= 0.0f)) throw ObjectiveError("perturb_coordinate: eps must be non-negative");
  LatentCoordinate out = c;
  if (eps > 0.0f) {
    Rng rng(seed);
    for (auto& v : out.values) v += static_cast<float>(rng.normal() * eps);
  }
  if (renormalize) {
    const float n = out.norm();
    if (n > 0.0f) {
      for (auto& v : out.values) v /= n;
    }
  }
  return out;
}

Tensor perturb_coordinates(const Tensor& coords, float eps, std::uint64_t seed, bool renormalize) {
  if (!(eps >= 0.0f)) throw ObjectiveError("perturb_coordinates: eps must be non-negative");
  if (coords.rank() != 2) throw ObjectiveError("perturb_coordinates: expected a [B, d] batch");
  Tensor out = coords;
  if (eps > 0.0f) {
    const std::size_t n = coords.dim(0), d = coords.dim(1);
    std::vector<float> noise(n * d);
    for (std::size_t b = 0; b < n; ++b) {
      Rng rng(derive_seed(seed, b));
      for (std::size_t j = 0; j < d; ++j) noise[b * d + j] = static_cast<float>(rng.normal() * eps);
    }
    out = ops::add(coords, Tensor::from_data(coords.shape(), std::move(noise)));
  }
  return renormalize ? ops::l2_normalize_rows(out) : out;
}

Tensor dlr_loss(const Model& model, const Tensor& coords, std::span<const TokenSequence> targets) {
  if (targets.empty()) throw ObjectiveError("dlr_loss: empty batch");
  if (coords.rank() != 2 || coords.dim(0) != targets.size()) {
    throw ObjectiveError("dlr_loss: " + std::to_string(targets.size()) + " targets for coordinates of shape " +
                         shape_to_string(coords.shape()));
  }
  std::vector<std::vector<std::int32_t>> inputs;
  std::size_t len = 0;
  for (const auto& t : targets) {
    validate_sequence(t, model.config().max_len);
    std::vector<std::int32_t> in{token::bos(t.lang)};
    in.insert(in.end(), t.ids.begin(), t.ids.end() - 1);
    len = std::max(len, in.size());
    inputs.push_back(std::move(in));
  }
  const std::size_t batch = targets.size();
  std::vector<std::int32_t> flat(batch * len, token::kPad);
  std::vector<float> weights(batch * len, 0.0f);
  for (std::size_t b = 0; b < batch; ++b) {
    const auto& ids = targets[b].ids;
    const float w = 1.0f / static_cast<float>(ids.size() * batch);
    for (std::size_t t = 0; t < ids.size(); ++t) {
      flat[b * len + t] = ids[t];
      weights[b * len + t] = w;
    }
  }
  return ops::cross_entropy(model.decode(coords, inputs), flat, weights);
}

float dlr_loss(const Model& model, const LatentCoordinate& c, const TokenSequence& target) {
  NoGradScope no_grad;
  return dlr_loss(model, stack_coordinates(std::span<const LatentCoordinate>(&c, 1)),
                  std::span<const TokenSequence>(&target, 1))
      .item();
}

}  // namespace latentbridge
