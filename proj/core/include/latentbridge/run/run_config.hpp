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
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "latentbridge/corpus/corpus.hpp"
#include "latentbridge/inference/beam_search.hpp"
#include "latentbridge/model/config.hpp"
#include "latentbridge/training/config.hpp"

namespace latentbridge {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Which corruption regime a reconstruction checkpoint is trained for.
enum class Regime { kCaption, kTranslate };

std::string_view regime_name(Regime regime);
Regime parse_regime(std::string_view name);

// Everything a run needs. Text form:
//
//   corpus_seed=1
//   train_seed=1
//   [corpus]        scenes, test, frames, vision_dim, jitter, max_len
//   [model]         d, enc_layers, dec_layers, heads, ffn_mult, max_len
//   [train]         any stage key; applies to every stage
//   [align-vision] [align-lingual] [dlr] [dlr-translate] [finetune]
//   [decode]        beam_size, max_len, alpha
//
// Stage sections override [train] regardless of order. [dlr] holds the
// captioning regime and [dlr-translate] the translation regime.
struct RunConfig {
  std::uint64_t corpus_seed = 1;
  std::uint64_t train_seed = 1;
  CorpusConfig corpus;
  ModelConfig model;
  TrainConfig align_vision;
  TrainConfig align_lingual;
  TrainConfig dlr_caption;
  TrainConfig dlr_translate;
  TrainConfig finetune;
  DecodeConfig decode;

  // Seeds are copied into the returned configs.
  CorpusConfig corpus_config() const;
  TrainConfig stage(Stage stage, Regime regime = Regime::kCaption) const;
  void validate() const;
};

RunConfig default_run_config();

// Later assignments win; repeating a key within one source is rejected.
RunConfig parse_run_config(std::string_view text, std::span<const std::string> overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

// Applies one "section.key=value" (or top-level "key=value") override.
void apply_override(RunConfig& config, std::string_view assignment);

std::string to_text(const RunConfig& config);

}  // namespace latentbridge
