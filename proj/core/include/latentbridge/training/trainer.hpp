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
#include <optional>
#include <vector>

#include "latentbridge/corpus/corpus.hpp"
#include "latentbridge/model/model.hpp"
#include "latentbridge/training/config.hpp"

namespace latentbridge {

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  Stage stage = Stage::kAlignVision;
  double loss = 0.0;      // mean batch loss over the epoch
};

using EpochCallback = std::function<void(const EpochLog&)>;

struct TrainResult {
  std::vector<double> epoch_losses;
  std::size_t steps = 0;
  std::size_t examples = 0;  // finetune: number of sampled pairs
};

// Each stage freezes every network it does not train and leaves the flags
// that way on return.

// Vision and pivot encoders, cda_loss over D1.
TrainResult train_vision_alignment(Model& model, const Corpus& corpus, const TrainConfig& cfg,
                                   const EpochCallback& on_epoch = {});
// Multilingual encoder against the frozen pivot encoder, round-robin over
// the pair sets of the configured languages.
TrainResult train_crosslingual_alignment(Model& model, const Corpus& corpus, const TrainConfig& cfg,
                                         const EpochCallback& on_epoch = {});
// Decoder reconstructs each sentence from the (masked, noised) coordinate
// of its corrupted form.
TrainResult train_dlr(Model& model, const Corpus& corpus, const TrainConfig& cfg, const EpochCallback& on_epoch = {});
// Decoder on floor(ratio * N)
// downstream (vision, finetune_lang) pairs.
TrainResult finetune_supervised(Model& model, const Corpus& corpus, const TrainConfig& cfg,
                                const EpochCallback& on_epoch = {});

TrainResult run_stage(Model& model, const Corpus& corpus, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// Stage a checkpoint must already contain before cfg.stage can run from it,
// or nothing for align-vision.
std::optional<Stage> required_stage(Stage stage);

}  // namespace latentbridge
