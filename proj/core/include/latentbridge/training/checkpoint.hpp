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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "latentbridge/model/config.hpp"
#include "latentbridge/model/model.hpp"
#include "latentbridge/numerics/tensor.hpp"

namespace latentbridge {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedTensor {
  std::string name;
  Shape shape;
  std::vector<float> values;

  bool operator==(const NamedTensor&) const = default;
};

// Binary layout: "ZNLG", u32 version, u32 tensor count, then per tensor
// u16 name length, name, u8 rank, rank x u32 dims, f32 payload; finally a
// u32 length-prefixed config record. All integers and floats little-endian.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  ModelConfig config;
  std::vector<NamedTensor> tensors;
  // One line per completed training stage, oldest first.
  std::vector<std::string> history;

  static Checkpoint from_model(const Model& model, std::vector<std::string> history = {});
  // Builds a model and copies every tensor in; names and shapes must match.
  Model to_model() const;
  bool has_stage(std::string_view stage) const;

  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace latentbridge
