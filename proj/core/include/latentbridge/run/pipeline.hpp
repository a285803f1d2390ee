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
#include <string>
#include <string_view>
#include <vector>

#include "latentbridge/corpus/corpus.hpp"
#include "latentbridge/evaluation/diagnostics.hpp"
#include "latentbridge/evaluation/metrics.hpp"
#include "latentbridge/model/model.hpp"
#include "latentbridge/run/run_config.hpp"

namespace latentbridge {

// An ablation setting of the full pipeline.
struct Variant {
  std::string name;
  bool cda = true;         // run the two alignment stages
  bool corruption = true;  // keep the regime's masking and noise in reconstruction
  std::vector<Language> languages{kAllLanguages.begin(), kAllLanguages.end()};
};

// full | no-corruption | no-cda | none | langs=L0,L1,...  (L0 is always kept)
Variant parse_variant(std::string_view text);

struct Task {
  Regime kind = Regime::kCaption;
  Language source = Language::kL0;  // ignored for captions
  Language target = Language::kL0;

  std::string name() const;  // "caption-L1", "translate-L1-L2"
  bool operator==(const Task&) const = default;
};

// Captioning into every used language and translation between every
// ordered pair of distinct used languages.
std::vector<Task> supported_tasks(const std::vector<Language>& languages);

struct TaskResult {
  Task task;
  MetricScores scores;
};

struct VariantResult {
  Variant variant;
  std::vector<TaskResult> rows;
  const TaskResult* find(const Task& task) const;
};

// The run's model shape completed with the corpus vocabulary and dimensions.
ModelConfig model_config_for(const RunConfig& run, const Corpus& corpus);

using ProgressLog = std::function<void(const std::string&)>;

// Trains the alignment stages of a variant. Without CDA the returned model is
// the untrained initialization.
Model train_alignment(const Corpus& corpus, const RunConfig& run, const Variant& variant, const ProgressLog& log = {});

// Trains reconstruction for one regime on top of an aligned model.
Model train_reconstruction(const Model& aligned, const Corpus& corpus, const RunConfig& run, const Variant& variant,
                           Regime regime, const ProgressLog& log = {});

TrainConfig variant_stage(const RunConfig& run, const Variant& variant, Stage stage, Regime regime);

// Held-out coordinates of one domain: vision through the vision encoder, L0
// through the pivot encoder, other languages through the multilingual one.
std::vector<LatentCoordinate> encode_test_domain(const Model& model, const Corpus& corpus, const Domain& domain);

// Decodes the held-out split for one task.
std::vector<TokenSequence> generate_task(const Model& model, const Corpus& corpus, const Task& task,
                                         const DecodeConfig& cfg);
MetricScores evaluate_task(const Model& model, const Corpus& corpus, const Task& task, const DecodeConfig& cfg);

// Full pipeline for one variant: alignment, one reconstruction model per
// regime (shared when the regimes coincide), then every supported task.
VariantResult run_variant(const Corpus& corpus, const RunConfig& run, const Variant& variant,
                          const ProgressLog& log = {});

// Tab-separated: variant, task, bleu4, rougeL, samples. Unsupported tasks
// have no row.
std::string ablation_table(const std::vector<VariantResult>& results);

}  // namespace latentbridge
