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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "latentbridge/run/pipeline.hpp"
#include "latentbridge/run/run_config.hpp"

namespace latentbridge {
namespace {

TEST(RunConfigTest, DefaultsFollowTheRegimes) {
  const RunConfig c = default_run_config();
  EXPECT_EQ(c.stage(Stage::kAlignVision).weights, (LossWeights{1.0f, 0.0f, 0.07f}));
  EXPECT_EQ(c.stage(Stage::kAlignLingual).weights, (LossWeights{0.0f, 1.0f, 0.07f}));
  EXPECT_EQ(c.stage(Stage::kDlr).mask_percent, 0.0f);
  EXPECT_FLOAT_EQ(c.stage(Stage::kDlr).noise_std, 0.1f);
  EXPECT_EQ(c.stage(Stage::kDlr, Regime::kTranslate).mask_percent, 5.0f);
  EXPECT_FLOAT_EQ(c.stage(Stage::kDlr, Regime::kTranslate).noise_std, 0.01f);
  EXPECT_EQ(c.decode.beam_size, 3u);
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfigTest, SectionsAndPrecedence) {
  const std::string text =
      "corpus_seed=7\n"
      "[dlr]\n"
      "epochs=3   # stage value wins over [train]\n"
      "[train]\n"
      "epochs=9\n"
      "learning_rate=1e-3\n"
      "[model]\n"
      "d=32\n"
      "[decode]\n"
      "beam_size=1\n";
  const std::vector<std::string> overrides{"train_seed=4", "align-lingual.languages=L0,L2"};
  const RunConfig c = parse_run_config(text, overrides);
  EXPECT_EQ(c.corpus_seed, 7u);
  EXPECT_EQ(c.corpus_config().seed, 7u);
  EXPECT_EQ(c.stage(Stage::kDlr).seed, 4u);
  EXPECT_EQ(c.stage(Stage::kDlr).epochs, 3u);
  EXPECT_EQ(c.stage(Stage::kAlignVision).epochs, 9u);
  EXPECT_FLOAT_EQ(c.stage(Stage::kFinetune).learning_rate, 1e-3f);
  EXPECT_EQ(c.model.d, 32u);
  EXPECT_EQ(c.decode.beam_size, 1u);
  EXPECT_EQ(c.stage(Stage::kAlignLingual).languages, (std::vector<Language>{Language::kL0, Language::kL2}));
}

TEST(RunConfigTest, RejectsBadInput) {
  EXPECT_THROW(parse_run_config("[model]\nwidth=3\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[nowhere]\nd=3\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[model]\nd=3\nd=4\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[model]\nd=abc\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[model]\nd\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[model\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[model]\nd=30\nheads=4\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[finetune]\nfinetune_ratio=0\n"), ConfigError);
  EXPECT_THROW(parse_run_config("[dlr]\nfinetune_lang=L9\n"), ConfigError);
  const std::vector<std::string> clash{"model.d=32", "model.d=16"};
  EXPECT_THROW(parse_run_config("", clash), ConfigError);
  const std::vector<std::string> malformed{"model.d"};
  EXPECT_THROW(parse_run_config("", malformed), ConfigError);
}

TEST(RunConfigTest, TextRoundTrip) {
  RunConfig c = default_run_config();
  apply_override(c, "dlr.noise_std=0.25");
  apply_override(c, "model.heads=2");
  apply_override(c, "finetune.finetune_replay=false");
  const RunConfig back = parse_run_config(to_text(c));
  EXPECT_EQ(to_text(back), to_text(c));
  EXPECT_EQ(back.dlr_caption, c.dlr_caption);
  EXPECT_EQ(back.finetune, c.finetune);
  EXPECT_EQ(back.model.heads, 2u);
}

TEST(RunConfigTest, ShippedDefaultFileMatchesDefaults) {
  const RunConfig shipped = load_run_config(LATENTBRIDGE_SOURCE_DIR "/configs/default.cfg");
  EXPECT_EQ(to_text(shipped), to_text(default_run_config()));
}

TEST(VariantTest, Parsing) {
  EXPECT_TRUE(parse_variant("full").cda);
  EXPECT_FALSE(parse_variant("no-corruption").corruption);
  EXPECT_FALSE(parse_variant("no-cda").cda);
  const Variant none = parse_variant("none");
  EXPECT_FALSE(none.cda || none.corruption);
  EXPECT_EQ(parse_variant("langs=L0").languages, (std::vector<Language>{Language::kL0}));
  EXPECT_EQ(parse_variant("langs=L2,L0,L2").languages, (std::vector<Language>{Language::kL0, Language::kL2}));
  EXPECT_THROW(parse_variant("half"), ConfigError);
  EXPECT_THROW(parse_variant("langs=L0,XX"), CorpusError);
}

TEST(VariantTest, TaskRowsFollowTheLanguages) {
  EXPECT_EQ(supported_tasks({Language::kL0}).size(), 1u);
  EXPECT_EQ(supported_tasks({Language::kL0, Language::kL1}).size(), 4u);
  const auto all = supported_tasks({kAllLanguages.begin(), kAllLanguages.end()});
  EXPECT_EQ(all.size(), 16u);
  EXPECT_EQ(all[1].name(), "caption-L1");
  EXPECT_EQ((Task{Regime::kTranslate, Language::kL1, Language::kL2}).name(), "translate-L1-L2");
}

RunConfig tiny_run() {
  RunConfig run = default_run_config();
  for (const char* o : {"corpus.scenes=180", "corpus.test=20", "corpus.vision_dim=8", "corpus.frames=2", "model.d=16",
                        "model.heads=2", "model.enc_layers=1", "model.dec_layers=1", "model.ffn_mult=2",
                        "align-vision.epochs=1", "align-lingual.epochs=1", "dlr.epochs=1", "dlr-translate.epochs=1"}) {
    apply_override(run, o);
  }
  run.validate();
  return run;
}

TEST(PipelineTest, SmokeRunProducesOneRowPerSupportedTask) {
  const RunConfig run = tiny_run();
  const Corpus corpus = generate_corpus(run.corpus_config());
  std::vector<std::string> lines;
  const auto result = run_variant(corpus, run, parse_variant("langs=L0,L1"), [&](const std::string& l) {
    lines.push_back(l);
  });
  ASSERT_EQ(result.rows.size(), 4u);
  for (const auto& row : result.rows) {
    EXPECT_EQ(row.scores.samples, 20u);
    EXPECT_GE(row.scores.bleu4, 0.0);
    EXPECT_LE(row.scores.bleu4, 1.0);
  }
  EXPECT_EQ(result.find(Task{Regime::kCaption, Language::kL2, Language::kL2}), nullptr);
  EXPECT_NE(result.find(Task{Regime::kTranslate, Language::kL1, Language::kL0}), nullptr);
  EXPECT_FALSE(lines.empty());
  EXPECT_EQ(lines.front().rfind("variant=langs=L0,L1 epoch=1 stage=align-vision loss=", 0), 0u);

  const std::string table = ablation_table({result});
  EXPECT_EQ(table.rfind("variant\ttask\tbleu4\trougeL\tsamples\n", 0), 0u);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
  EXPECT_NE(table.find("langs=L0,L1\ttranslate-L0-L1\t"), std::string::npos);
}

TEST(PipelineTest, VariantStagesDropCorruption) {
  const RunConfig run = default_run_config();
  const auto cfg = variant_stage(run, parse_variant("no-corruption"), Stage::kDlr, Regime::kTranslate);
  EXPECT_EQ(cfg.mask_percent, 0.0f);
  EXPECT_EQ(cfg.noise_std, 0.0f);
  EXPECT_EQ(cfg, variant_stage(run, parse_variant("no-corruption"), Stage::kDlr, Regime::kCaption));
}

}  // namespace
}  // namespace latentbridge
