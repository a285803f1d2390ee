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
#include <stdexcept>

#include "latentbridge/corpus/types.hpp"
#include "latentbridge/model/model.hpp"
#include "latentbridge/numerics/tensor.hpp"

namespace latentbridge {

class ObjectiveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LossWeights {
  float lambda1 = 0.0f;  // InfoNCE
  float lambda2 = 1.0f;  // MSE
  float tau = 0.07f;

  void validate() const;
  bool operator==(const LossWeights&) const = default;
};

// Rows of S and D are paired by index. Both must be unit-norm within 1e-3.
Tensor info_nce(const Tensor& s, const Tensor& d, float tau);
// (1 / 2K) * sum_k |s_k - d_k|^2.
Tensor mse(const Tensor& s, const Tensor& d);
// lambda1 * info_nce + lambda2 * mse; zero-weighted terms are not evaluated.
Tensor cda_loss(const Tensor& s, const Tensor& d, const LossWeights& w);

// c + n with n_i ~ N(0, eps^2). The result is not renormalized unless asked.
LatentCoordinate perturb_coordinate(const LatentCoordinate& c, float eps, std::uint64_t seed,
                                    bool renormalize = false);
// Batched form; row b draws from derive_seed(seed, b). Gradient flows to coords.
Tensor perturb_coordinates(const Tensor& coords, float eps, std::uint64_t seed, bool renormalize = false);

// Teacher-forced reconstruction cross-entropy, mean over each target's
// positions, then mean over the batch. Row b of coords conditions targets[b],
// decoded after BOS of targets[b].lang.
Tensor dlr_loss(const Model& model, const Tensor& coords, std::span<const TokenSequence> targets);
float dlr_loss(const Model& model, const LatentCoordinate& c, const TokenSequence& target);

}  // namespace latentbridge
