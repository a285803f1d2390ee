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
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "latentbridge/corpus/types.hpp"
#include "latentbridge/objectives/objectives.hpp"

namespace latentbridge {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stage { kAlignVision, kAlignLingual, kDlr, kFinetune };

std::string_view stage_name(Stage stage);  // "align-vision", ...
Stage parse_stage(std::string_view name);

struct TrainConfig {
  Stage stage = Stage::kAlignVision;
  LossWeights weights;
  float mask_percent = 0.0f;  // r
  float noise_std = 0.0f;     // epsilon
  bool renormalize_noise = false;
  float learning_rate = 3e-4f;
  std::size_t warmup_steps = 100;
  float weight_decay = 0.01f;
  std::size_t batch_align = 64;
  std::size_t batch_dlr = 32;
  std::size_t epochs = 20;
  std::uint64_t seed = 1;
  bool train_encoder_in_dlr = false;
  // Align each pivot sentence's multilingual coordinate with its own pivot
  // coordinate during cross-lingual alignment.
  bool pivot_self_pairs = true;
  double finetune_ratio = 0.01;
  Language finetune_lang = Language::kL1;
  // Interleave reconstruction batches (with this config's corruption) in
  // the target language while finetuning.
  bool finetune_replay = true;
  // Languages used by cross-lingual alignment and reconstruction.
  std::vector<Language> languages{kAllLanguages.begin(), kAllLanguages.end()};

  void validate() const;
  bool uses(Language lang) const;
  bool operator==(const TrainConfig&) const = default;
};

// Per-stage defaults: align-vision uses InfoNCE, align-lingual MSE, dlr the
// captioning corruption regime (r, eps) = (0, 0.1).
TrainConfig default_train_config(Stage stage);

}  // namespace latentbridge
