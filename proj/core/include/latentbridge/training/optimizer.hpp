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

#include <cstddef>
#include <vector>

#include "latentbridge/model/parameters.hpp"

namespace latentbridge {

struct AdamWConfig {
  float learning_rate = 3e-4f;
  std::size_t warmup_steps = 100;
  float weight_decay = 0.01f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
};

// Adam with decoupled weight decay over the trainable tensors of a
// ParameterSet. Learning rate ramps linearly over warmup, then stays fixed.
class AdamW {
 public:
  AdamW(ParameterSet& params, const AdamWConfig& config);

  // base * min(1, step / warmup) for the 1-based step index.
  float learning_rate_at(std::size_t step) const;

  // Applies one update from the accumulated gradients, then clears them.
  // Throws TrainingError, leaving every tensor untouched, if any gradient
  // is non-finite.
  void step();

  std::size_t step_count() const { return step_; }

 private:
  ParameterSet& params_;
  AdamWConfig config_;
  std::vector<std::vector<float>> m_;
  std::vector<std::vector<float>> v_;
  std::size_t step_ = 0;
};

}  // namespace latentbridge
