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

#include "latentbridge/model/parameters.hpp"

#include <algorithm>

#include "latentbridge/model/config.hpp"

namespace latentbridge {

std::string_view subnetwork_name(SubNetwork net) {
  switch (net) {
    case SubNetwork::kVision: return "vision";
    case SubNetwork::kPivot: return "pivot";
    case SubNetwork::kMulti: return "multi";
    case SubNetwork::kDecoder: return "decoder";
  }
  return "?";
}

Tensor ParameterSet::add(std::string name, SubNetwork owner, Tensor value) {
  if (find(name) != nullptr) throw ModelError("duplicate parameter name: " + name);
  value.set_requires_grad(!frozen(owner));
  entries_.push_back(Entry{std::move(name), owner, value});
  return value;
}

void ParameterSet::set_frozen(SubNetwork net, bool frozen) {
  frozen_[static_cast<std::size_t>(net)] = frozen;
  for (auto& e : entries_) {
    if (e.owner == net) e.value.set_requires_grad(!frozen);
  }
}

void ParameterSet::train_only(std::initializer_list<SubNetwork> nets) {
  for (SubNetwork net : kAllSubNetworks) {
    set_frozen(net, std::find(nets.begin(), nets.end(), net) == nets.end());
  }
}

const ParameterSet::Entry* ParameterSet::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.numel();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& e : entries_) e.value.zero_grad();
}

Tensor normal_init(Shape shape, Rng& rng, float stddev) {
  std::vector<float> values(shape_numel(shape));
  for (auto& v : values) v = static_cast<float>(rng.normal() * stddev);
  return Tensor::from_data(std::move(shape), std::move(values));
}

}  // namespace latentbridge
