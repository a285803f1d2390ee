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

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "latentbridge/numerics/random.hpp"
#include "latentbridge/numerics/tensor.hpp"

namespace latentbridge {

// The four networks that share one latent space.
enum class SubNetwork { kVision, kPivot, kMulti, kDecoder };
inline constexpr std::array<SubNetwork, 4> kAllSubNetworks{SubNetwork::kVision, SubNetwork::kPivot,
                                                           SubNetwork::kMulti, SubNetwork::kDecoder};
std::string_view subnetwork_name(SubNetwork net);

// Named tensors grouped by sub-network. Frozen groups have requires_grad off,
// so no gradient reaches them and optimizers skip them.
class ParameterSet {
 public:
  struct Entry {
    std::string name;
    SubNetwork owner;
    Tensor value;
  };

  Tensor add(std::string name, SubNetwork owner, Tensor value);

  void set_frozen(SubNetwork net, bool frozen);
  bool frozen(SubNetwork net) const { return frozen_[static_cast<std::size_t>(net)]; }
  // Freezes everything except the listed networks.
  void train_only(std::initializer_list<SubNetwork> nets);

  const std::vector<Entry>& entries() const { return entries_; }
  const Entry* find(std::string_view name) const;
  std::size_t count() const { return entries_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

 private:
  std::vector<Entry> entries_;
  std::array<bool, 4> frozen_{false, false, false, false};
};

// Weights ~ N(0, stddev); used for every matrix and embedding table.
Tensor normal_init(Shape shape, Rng& rng, float stddev = 0.02f);

}  // namespace latentbridge
