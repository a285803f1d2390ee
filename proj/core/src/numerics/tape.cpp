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

#include "latentbridge/numerics/tape.hpp"

#include <algorithm>
#include <unordered_set>

namespace latentbridge {

namespace {
thread_local Tape* g_active_tape = nullptr;
}

Tape* active_tape() { return g_active_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }
TapeScope::~TapeScope() { g_active_tape = previous_; }

NoGradScope::NoGradScope() : previous_(g_active_tape) { g_active_tape = nullptr; }
NoGradScope::~NoGradScope() { g_active_tape = previous_; }

void Tape::record(std::vector<std::shared_ptr<detail::TensorImpl>> inputs,
                  std::shared_ptr<detail::TensorImpl> output, BackwardFn fn) {
  output->requires_grad = true;
  output->is_leaf = false;
  nodes_.push_back(Node{std::move(inputs), std::move(output), std::move(fn)});
}

void Tape::backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw ShapeError("backward requires a scalar loss, got shape " + shape_to_string(loss.shape()));
  }
  if (!loss.requires_grad()) return;  // constant loss: nothing to propagate
  const auto& root = loss.impl();
  if (root->is_leaf) {
    root->grad_buffer()[0] += 1.0f;
    return;
  }
  auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.output == root; });
  if (it == nodes_.end()) throw std::logic_error("backward: loss was not recorded on this tape");

  // Intermediate gradients are per-pass; leaves accumulate across passes.
  for (auto& node : nodes_) {
    if (!node.output->grad.empty()) std::fill(node.output->grad.begin(), node.output->grad.end(), 0.0f);
  }
  root->grad_buffer()[0] = 1.0f;
  const auto last = static_cast<std::ptrdiff_t>(it - nodes_.begin());
  for (std::ptrdiff_t i = last; i >= 0; --i) {
    Node& node = nodes_[static_cast<std::size_t>(i)];
    if (node.output->grad.empty()) continue;  // not reached from the loss
    node.fn();
  }
}

}  // namespace latentbridge
