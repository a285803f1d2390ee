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

#include "latentbridge/training/config.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace latentbridge {

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kAlignVision: return "align-vision";
    case Stage::kAlignLingual: return "align-lingual";
    case Stage::kDlr: return "dlr";
    case Stage::kFinetune: return "finetune";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::kAlignVision, Stage::kAlignLingual, Stage::kDlr, Stage::kFinetune}) {
    if (name == stage_name(s)) return s;
  }
  throw TrainingError("unknown stage '" + std::string(name) +
                      "' (expected align-vision, align-lingual, dlr or finetune)");
}

void TrainConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw TrainingError("invalid training config: " + what);
  };
  try {
    weights.validate();
  } catch (const ObjectiveError& e) {
    throw TrainingError(std::string("invalid training config: ") + e.what());
  }
  need(learning_rate > 0.0f && std::isfinite(learning_rate), "learning_rate must be positive");
  need(weight_decay >= 0.0f, "weight_decay must be non-negative");
  need(batch_align >= 1 && batch_dlr >= 1, "batch sizes must be at least 1");
  need(mask_percent >= 0.0f && mask_percent <= 100.0f, "mask_percent must lie in [0, 100]");
  need(noise_std >= 0.0f, "noise_std must be non-negative");
  need(finetune_ratio > 0.0 && finetune_ratio <= 1.0, "finetune_ratio must lie in (0, 1]");
  need(!languages.empty(), "at least one language is required");
  for (std::size_t i = 0; i < languages.size(); ++i) {
    need(std::count(languages.begin(), languages.end(), languages[i]) == 1, "languages must not repeat");
  }
}

bool TrainConfig::uses(Language lang) const {
  return std::find(languages.begin(), languages.end(), lang) != languages.end();
}

TrainConfig default_train_config(Stage stage) {
  TrainConfig cfg;
  cfg.stage = stage;
  switch (stage) {
    case Stage::kAlignVision:
      cfg.weights = {1.0f, 0.0f, 0.07f};
      break;
    case Stage::kAlignLingual:
      cfg.weights = {0.0f, 1.0f, 0.07f};
      break;
    case Stage::kDlr:
      cfg.mask_percent = 0.0f;
      cfg.noise_std = 0.1f;
      break;
    case Stage::kFinetune:
      cfg.noise_std = 0.1f;
      break;
  }
  return cfg;
}

}  // namespace latentbridge
