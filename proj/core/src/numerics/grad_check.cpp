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

#include "latentbridge/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latentbridge/numerics/tape.hpp"

namespace latentbridge {

namespace {

float evaluate(const std::function<Tensor(const Tensor&)>& f, const Tensor& x, std::size_t coord) {
  NoGradScope no_grad;
  const float value = f(x).item();
  if (!std::isfinite(value)) {
    throw NonFiniteError("grad_check: non-finite function value at coordinate " + std::to_string(coord));
  }
  return value;
}

}  // namespace

float grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x, float step) {
  if (!(step > 0.0f)) throw std::invalid_argument("grad_check: step must be positive");
  const bool had_flag = x.requires_grad();
  x.set_requires_grad(true);
  x.zero_grad();

  std::vector<float> analytic;
  {
    Tape tape;
    TapeScope scope(tape);
    Tensor y = f(x);
    if (y.numel() != 1) throw ShapeError("grad_check: function must return a scalar");
    tape.backward(y);
    analytic = x.grad();
  }
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    if (!std::isfinite(analytic[i])) {
      throw NonFiniteError("grad_check: non-finite analytic gradient at coordinate " + std::to_string(i));
    }
  }

  auto values = x.data();
  float worst = 0.0f;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float original = values[i];
    // Divide by the perturbation actually realized in float, not the nominal one.
    const float up = original + step;
    const float down = original - step;
    values[i] = up;
    const float plus = evaluate(f, x, i);
    values[i] = down;
    const float minus = evaluate(f, x, i);
    values[i] = original;
    const float numeric = static_cast<float>((static_cast<double>(plus) - minus) /
                                             (static_cast<double>(up) - down));
    const float err = std::abs(analytic[i] - numeric) / std::max(1.0f, std::abs(numeric));
    worst = std::max(worst, err);
  }
  x.zero_grad();
  x.set_requires_grad(had_flag);
  return worst;
}

}  // namespace latentbridge
