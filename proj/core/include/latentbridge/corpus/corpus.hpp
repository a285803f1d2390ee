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
#include <vector>

#include "latentbridge/corpus/types.hpp"
#include "latentbridge/corpus/vocab.hpp"

namespace latentbridge {

struct CorpusConfig {
  std::uint64_t seed = 1;
  std::size_t scenes = 2000;
  std::size_t test = 200;
  std::size_t frames = 8;
  std::size_t vision_dim = 64;
  float jitter = 0.05f;
  std::size_t max_len = 24;
  Inventory inventory;
};

// Unique scenes drawn uniformly from the inventory. Deterministic in seed.
std::vector<Scene> gen_scenes(std::uint64_t seed, std::size_t n, const Inventory& inventory);

// Number of words in every pivot sentence, and the word-order permutation of
// each language: rendered[i] = pivot[order[i]].
inline constexpr std::size_t kSentenceSlots = 6;
const std::array<std::size_t, kSentenceSlots>& word_order(Language lang);

// Owns everything fixed at corpus creation: the vocabulary, the per-language
// substitution tables, and the vision projection matrix.
class SceneRenderer {
 public:
  SceneRenderer(std::uint64_t seed, const Inventory& inventory, std::size_t vision_dim);

  const Vocab& vocab() const { return vocab_; }
  const Inventory& inventory() const { return inventory_; }
  std::size_t vision_dim() const { return vision_dim_; }

  TokenSequence render_text(const Scene& scene, Language lang) const;
  // Multi-hot scene attributes through the fixed projection, plus per-frame
  // Gaussian jitter with standard deviation `jitter`.
  VisionItem render_vision(const Scene& scene, std::size_t frames, float jitter, std::uint64_t seed) const;

  // Maps an L0 surface id to its translation in lang (identity for L0).
  std::int32_t translate_word(std::int32_t pivot_id, Language lang) const;

 private:
  void validate(const Scene& scene) const;

  Inventory inventory_;
  std::size_t vision_dim_;
  Vocab vocab_;
  // pivot word index -> id in each language
  std::array<std::vector<std::int32_t>, kNumLanguages> word_ids_;
  std::int32_t pivot_base_ = token::kFirstSurface;
  std::vector<float> projection_;  // [attribute_count, vision_dim]
};

struct PairRecord {
  std::size_t scene_id = 0;
  VisionItem vision;  // set when a is the vision domain
  TokenSequence a_text;
  TokenSequence b_text;
};

struct PairSet {
  std::string name;  // "D1".."D4"
  Domain a;
  Domain b;
  std::vector<PairRecord> pairs;
};

// Held-out scenes rendered into every domain; index i refers to scene_ids[i].
struct TestSplit {
  std::vector<std::size_t> scene_ids;
  std::vector<VisionItem> vision;
  std::array<std::vector<TokenSequence>, kNumLanguages> text;
};

// Labeled (vision, text) data for the scenes outside the test split; the
// pool that supervised fine-tuning samples from.
struct DownstreamRecord {
  std::size_t scene_id = 0;
  VisionItem vision;
  std::array<TokenSequence, kNumLanguages> text;
};

struct Corpus {
  CorpusConfig config;
  Vocab vocab;
  std::vector<Scene> scenes;          // scene_id indexes this list
  std::array<PairSet, 4> pairsets;    // D1 = (vision, L0), Dk = (L0, L(k-1))
  TestSplit test;
  std::vector<DownstreamRecord> downstream;

  const PairSet& pairset(Language partner) const;  // L1->D2, L2->D3, L3->D4
};

struct Partition {
  std::vector<std::size_t> test;
  std::array<std::vector<std::size_t>, 4> train;  // per pair set, equal sizes
};

// Splits scene indices into a held-out test block and four equal, disjoint
// training blocks. Throws CorpusError when |scenes| < 8 * test or test == 0.
Partition partition_scenes(std::size_t scene_count, std::size_t test, std::uint64_t seed);

Corpus generate_corpus(const CorpusConfig& config);

struct MaskingScheme {
  double mask = 0.8;
  double random = 0.1;
  double keep = 0.1;
};

// Selects each surface token with probability percent/100 and replaces it by
// MASK, a random surface token of the same language, or itself, according to
// the scheme. EOS is never selected.
TokenSequence mask_tokens(const TokenSequence& seq, double percent, std::uint64_t seed, const Vocab& vocab,
                          const MaskingScheme& scheme = {});

}  // namespace latentbridge
