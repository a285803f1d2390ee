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

#include "latentbridge/run/pipeline.hpp"

#include <algorithm>
#include <sstream>

#include "latentbridge/corpus/corpus_io.hpp"
#include "latentbridge/inference/beam_search.hpp"
#include "latentbridge/numerics/tape.hpp"
#include "latentbridge/training/trainer.hpp"

namespace latentbridge {
namespace {

void log_epochs(const ProgressLog& log, const Variant& variant, const EpochLog& e) {
  if (log) {
    log("variant=" + variant.name + " epoch=" + std::to_string(e.epoch) + " stage=" + std::string(stage_name(e.stage)) +
        " loss=" + format_float(static_cast<float>(e.loss)));
  }
}

}  // namespace

ModelConfig model_config_for(const RunConfig& run, const Corpus& corpus) {
  ModelConfig m = run.model;
  m.max_len = corpus.config.max_len;
  m.vision_dim = corpus.config.vision_dim;
  m.vocab_size = corpus.vocab.size();
  return m;
}

Variant parse_variant(std::string_view text) {
  Variant v;
  v.name = std::string(text);
  if (text == "full") return v;
  if (text == "no-corruption") {
    v.corruption = false;
    return v;
  }
  if (text == "no-cda") {
    v.cda = false;
    return v;
  }
  if (text == "none") {
    v.cda = false;
    v.corruption = false;
    return v;
  }
  if (text.starts_with("langs=")) {
    v.languages = {Language::kL0};
    std::string_view rest = text.substr(6);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view tag = rest.substr(0, comma);
      const Language lang = require_language(tag);
      if (std::find(v.languages.begin(), v.languages.end(), lang) == v.languages.end()) v.languages.push_back(lang);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    std::sort(v.languages.begin(), v.languages.end());
    return v;
  }
  throw ConfigError("unknown variant '" + std::string(text) +
                    "' (expected full, no-corruption, no-cda, none or langs=<tags>)");
}

std::string Task::name() const {
  if (kind == Regime::kCaption) return "caption-" + std::string(language_tag(target));
  return "translate-" + std::string(language_tag(source)) + "-" + std::string(language_tag(target));
}

std::vector<Task> supported_tasks(const std::vector<Language>& languages) {
  std::vector<Task> out;
  for (Language l : languages) out.push_back(Task{Regime::kCaption, l, l});
  for (Language s : languages) {
    for (Language t : languages) {
      if (s != t) out.push_back(Task{Regime::kTranslate, s, t});
    }
  }
  return out;
}

const TaskResult* VariantResult::find(const Task& task) const {
  for (const auto& r : rows) {
    if (r.task == task) return &r;
  }
  return nullptr;
}

TrainConfig variant_stage(const RunConfig& run, const Variant& variant, Stage stage, Regime regime) {
  TrainConfig cfg = run.stage(stage, regime);
  cfg.languages = variant.languages;
  if (!variant.corruption) {
    cfg.mask_percent = 0.0f;
    cfg.noise_std = 0.0f;
  }
  return cfg;
}

Model train_alignment(const Corpus& corpus, const RunConfig& run, const Variant& variant, const ProgressLog& log) {
  Model model(model_config_for(run, corpus), run.train_seed);
  if (!variant.cda) return model;
  auto on_epoch = [&](const EpochLog& e) { log_epochs(log, variant, e); };
  train_vision_alignment(model, corpus, variant_stage(run, variant, Stage::kAlignVision, Regime::kCaption), on_epoch);
  train_crosslingual_alignment(model, corpus, variant_stage(run, variant, Stage::kAlignLingual, Regime::kCaption),
                               on_epoch);
  return model;
}

Model train_reconstruction(const Model& aligned, const Corpus& corpus, const RunConfig& run, const Variant& variant,
                           Regime regime, const ProgressLog& log) {
  Model model = aligned.clone();
  train_dlr(model, corpus, variant_stage(run, variant, Stage::kDlr, regime),
            [&](const EpochLog& e) { log_epochs(log, variant, e); });
  return model;
}

std::vector<LatentCoordinate> encode_test_domain(const Model& model, const Corpus& corpus, const Domain& domain) {
  constexpr std::size_t kChunk = 64;
  NoGradScope no_grad;
  std::vector<LatentCoordinate> out;
  const std::size_t n = corpus.test.scene_ids.size();
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t count = std::min(kChunk, n - start);
    Tensor batch;
    if (domain.vision) {
      batch = model.encode_vision(std::span(corpus.test.vision).subspan(start, count));
    } else {
      const auto seqs = std::span(corpus.test.text[index_of(domain.lang)]).subspan(start, count);
      batch = domain.lang == Language::kL0 ? model.encode_pivot(seqs) : model.encode_multi(seqs);
    }
    for (std::size_t r = 0; r < count; ++r) out.push_back(row_coordinate(batch, r));
  }
  return out;
}

std::vector<TokenSequence> generate_task(const Model& model, const Corpus& corpus, const Task& task,
                                         const DecodeConfig& cfg) {
  std::vector<TokenSequence> out;
  if (task.kind == Regime::kCaption) {
    for (const auto& v : corpus.test.vision) out.push_back(caption(model, v, task.target, cfg).sequence);
  } else {
    for (const auto& s : corpus.test.text[index_of(task.source)]) {
      out.push_back(translate(model, s, task.target, cfg).sequence);
    }
  }
  return out;
}

MetricScores evaluate_task(const Model& model, const Corpus& corpus, const Task& task, const DecodeConfig& cfg) {
  const auto hyps = generate_task(model, corpus, task, cfg);
  return score_corpus(hyps, corpus.test.text[index_of(task.target)]);
}

VariantResult run_variant(const Corpus& corpus, const RunConfig& run, const Variant& variant, const ProgressLog& log) {
  const Model aligned = train_alignment(corpus, run, variant, log);
  const Model caption_model = train_reconstruction(aligned, corpus, run, variant, Regime::kCaption, log);
  std::optional<Model> translate_model;
  if (variant_stage(run, variant, Stage::kDlr, Regime::kTranslate) !=
      variant_stage(run, variant, Stage::kDlr, Regime::kCaption)) {
    translate_model = train_reconstruction(aligned, corpus, run, variant, Regime::kTranslate, log);
  }
  VariantResult result{variant, {}};
  for (const Task& task : supported_tasks(variant.languages)) {
    const Model& m = task.kind == Regime::kTranslate && translate_model ? *translate_model : caption_model;
    result.rows.push_back(TaskResult{task, evaluate_task(m, corpus, task, run.decode)});
    if (log) {
      log("variant=" + variant.name + " task=" + task.name() +
          " bleu4=" + format_float(static_cast<float>(result.rows.back().scores.bleu4)));
    }
  }
  return result;
}

std::string ablation_table(const std::vector<VariantResult>& results) {
  std::ostringstream out;
  out << "variant\ttask\tbleu4\trougeL\tsamples\n";
  for (const auto& r : results) {
    for (const auto& row : r.rows) {
      out << r.variant.name << '\t' << row.task.name() << '\t' << format_float(static_cast<float>(row.scores.bleu4))
          << '\t' << format_float(static_cast<float>(row.scores.rougeL)) << '\t' << row.scores.samples << '\n';
    }
  }
  return out.str();
}

}  // namespace latentbridge
