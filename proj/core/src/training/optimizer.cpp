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

#include "latentbridge/training/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "latentbridge/training/config.hpp"

namespace latentbridge {

AdamW::AdamW(ParameterSet& params, const AdamWConfig& config) : params_(params), config_(config) {
  for (const auto& e : params_.entries()) {
    m_.emplace_back(e.value.numel(), 0.0f);
    v_.emplace_back(e.value.numel(), 0.0f);
  }
}

float AdamW::learning_rate_at(std::size_t step) const {
  if (config_.warmup_steps == 0) return config_.learning_rate;
  const double ramp = std::min(1.0, static_cast<double>(step) / static_cast<double>(config_.warmup_steps));
  return static_cast<float>(config_.learning_rate * ramp);
}

void AdamW::step() {
  const auto& entries = params_.entries();
  if (entries.size() != m_.size()) throw TrainingError("optimizer: parameter set changed size");
  for (const auto& e : entries) {
    if (!e.value.requires_grad() || !e.value.has_grad()) continue;
    const auto& grad = e.value.impl()->grad;
    for (float g : grad) {
      if (!std::isfinite(g)) throw TrainingError("optimizer: non-finite gradient in " + e.name + "; step aborted");
    }
  }

  ++step_;
  const float lr = learning_rate_at(step_);
  const double c1 = 1.0 - std::pow(double(config_.beta1), double(step_));
  const double c2 = 1.0 - std::pow(double(config_.beta2), double(step_));
  const float decay = 1.0f - lr * config_.weight_decay;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Tensor value = entries[i].value;
    if (!value.requires_grad()) continue;
    auto w = value.data();
    auto& m = m_[i];
    auto& v = v_[i];
    const bool has_grad = value.has_grad();
    const float* g = has_grad ? value.impl()->grad.data() : nullptr;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const float gj = has_grad ? g[j] : 0.0f;
      m[j] = config_.beta1 * m[j] + (1.0f - config_.beta1) * gj;
      v[j] = config_.beta2 * v[j] + (1.0f - config_.beta2) * gj * gj;
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      w[j] = w[j] * decay - static_cast<float>(lr * mhat / (std::sqrt(vhat) + config_.eps));
    }
    value.zero_grad();
  }
}

}  // namespace latentbridge
