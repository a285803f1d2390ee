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

#include <functional>
#include <stdexcept>

#include "latentbridge/numerics/tensor.hpp"

namespace latentbridge {

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Compares the tape gradient of a scalar function against central differences.
// Returns max_i |analytic_i - numeric_i| / max(1, |numeric_i|). The function
// must be deterministic; x is restored before returning.
float grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor& x,
                 float step);

}  // namespace latentbridge
