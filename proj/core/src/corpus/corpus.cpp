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

#include "latentbridge/corpus/corpus.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "latentbridge/numerics/random.hpp"

namespace latentbridge {

namespace {

const std::vector<std::string> kAgentWords{"dog",  "cat",   "bird", "horse", "child", "woman",
                                           "man",  "farmer", "robot", "chef", "pilot", "teacher"};
const std::vector<std::string> kActionWords{"sees", "chases", "carries", "paints", "lifts", "pushes", "finds", "holds"};
const std::vector<std::string> kObjectWords{"ball", "box", "kite", "apple", "chair", "drum",
                                            "lamp", "book", "cup", "hat", "bike", "rope"};
const std::vector<std::string> kModifierWords{"red", "big", "old", "small", "blue", "shiny"};

// Consonant sets per derived language keep the lexicons visually distinct.
const std::array<std::string_view, kNumLanguages> kOnsets{"", "ktmnsr", "bdglpv", "fhjwzc"};
const std::array<std::string_view, kNumLanguages> kNuclei{"", "aou", "eia", "oie"};

void append_words(std::vector<std::string>& out, const std::vector<std::string>& words, std::size_t count,
                  std::string_view fallback) {
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(i < words.size() ? words[i] : std::string(fallback) + std::to_string(i));
  }
}

// Pivot word list in slot order: function words, agents, actions, objects, modifiers.
std::vector<std::string> pivot_words(const Inventory& inv) {
  std::vector<std::string> words{"the", "a"};
  append_words(words, kAgentWords, inv.agents, "agent");
  append_words(words, kActionWords, inv.actions, "action");
  append_words(words, kObjectWords, inv.objects, "object");
  append_words(words, kModifierWords, inv.modifiers, "modifier");
  return words;
}

std::string pseudo_word(Rng& rng, Language lang) {
  const auto onsets = kOnsets[index_of(lang)];
  const auto nuclei = kNuclei[index_of(lang)];
  const std::size_t syllables = 2 + rng.uniform_int(2);
  std::string w;
  for (std::size_t s = 0; s < syllables; ++s) {
    w += onsets[rng.uniform_int(onsets.size())];
    w += nuclei[rng.uniform_int(nuclei.size())];
  }
  return w;
}

constexpr std::size_t kTheSlot = 0;
constexpr std::size_t kASlot = 1;

}  // namespace

const std::array<std::size_t, kSentenceSlots>& word_order(Language lang) {
  // Pivot slots: 0 "the", 1 agent, 2 action, 3 "a", 4 modifier, 5 object.
  static const std::array<std::array<std::size_t, kSentenceSlots>, kNumLanguages> kOrders{{
      {0, 1, 2, 3, 4, 5},
      {0, 1, 3, 4, 5, 2},  // verb-final
      {2, 0, 1, 3, 5, 4},  // verb-initial, modifier after noun
      {3, 5, 4, 0, 1, 2},  // object-fronted
  }};
  return kOrders[index_of(lang)];
}

std::vector<Scene> gen_scenes(std::uint64_t seed, std::size_t n, const Inventory& inventory) {
  const std::size_t total = inventory.combinations();
  if (n < 4) throw CorpusError("gen_scenes: need at least 4 scenes, got " + std::to_string(n));
  if (n > total) {
    throw CorpusError("gen_scenes: " + std::to_string(n) + " scenes requested but the inventory has only " +
                      std::to_string(total) + " combinations");
  }
  Rng rng(seed);
  std::vector<std::size_t> codes;
  if (n * 2 > total) {
    codes.resize(total);
    for (std::size_t i = 0; i < total; ++i) codes[i] = i;
    rng.shuffle(codes);
    codes.resize(n);
  } else {
    std::unordered_set<std::size_t> seen;
    while (codes.size() < n) {
      const auto c = static_cast<std::size_t>(rng.uniform_int(total));
      if (seen.insert(c).second) codes.push_back(c);
    }
  }
  std::vector<Scene> scenes;
  scenes.reserve(n);
  for (std::size_t c : codes) {
    Scene s;
    s.agent = static_cast<std::uint32_t>(c % inventory.agents);
    c /= inventory.agents;
    s.action = static_cast<std::uint32_t>(c % inventory.actions);
    c /= inventory.actions;
    s.object = static_cast<std::uint32_t>(c % inventory.objects);
    c /= inventory.objects;
    s.modifier = static_cast<std::uint32_t>(c);
    scenes.push_back(s);
  }
  return scenes;
}

SceneRenderer::SceneRenderer(std::uint64_t seed, const Inventory& inventory, std::size_t vision_dim)
    : inventory_(inventory), vision_dim_(vision_dim) {
  if (inventory.agents == 0 || inventory.actions == 0 || inventory.objects == 0 || inventory.modifiers == 0) {
    throw CorpusError("inventory sizes must be positive");
  }
  if (vision_dim == 0) throw CorpusError("vision_dim must be positive");
  const std::vector<std::string> pivot = pivot_words(inventory);
  const std::size_t n_words = pivot.size();

  // lexicon[l][i] is the translation of pivot word i in language l.
  std::array<std::vector<std::string>, kNumLanguages> lexicon;
  lexicon[0] = pivot;
  std::set<std::string> taken(pivot.begin(), pivot.end());
  for (Language lang : {Language::kL1, Language::kL2, Language::kL3}) {
    Rng rng(derive_seed(seed, 100 + index_of(lang)));
    auto& words = lexicon[index_of(lang)];
    while (words.size() < n_words) {
      std::string w = pseudo_word(rng, lang);
      if (taken.insert(w).second) words.push_back(w);
    }
  }

  // The vocabulary lists each language's words alphabetically, so ids carry
  // no trace of the substitution table.
  std::array<std::vector<std::string>, kNumLanguages> sorted;
  for (std::size_t l = 0; l < kNumLanguages; ++l) {
    sorted[l] = lexicon[l];
    std::sort(sorted[l].begin(), sorted[l].end());
  }
  vocab_ = Vocab(sorted);
  for (std::size_t l = 0; l < kNumLanguages; ++l) {
    word_ids_[l].resize(n_words);
    for (std::size_t i = 0; i < n_words; ++i) word_ids_[l][i] = vocab_.id(lexicon[l][i]);
  }

  Rng rng(derive_seed(seed, 200));
  projection_.resize(inventory.attribute_count() * vision_dim);
  for (auto& v : projection_) v = static_cast<float>(rng.normal() * 0.5);
}

void SceneRenderer::validate(const Scene& s) const {
  if (s.agent >= inventory_.agents || s.action >= inventory_.actions || s.object >= inventory_.objects ||
      s.modifier >= inventory_.modifiers) {
    throw CorpusError("scene attribute outside inventory bounds");
  }
}

std::int32_t SceneRenderer::translate_word(std::int32_t pivot_id, Language lang) const {
  const auto& pivot_ids = word_ids_[0];
  auto it = std::find(pivot_ids.begin(), pivot_ids.end(), pivot_id);
  if (it == pivot_ids.end()) throw CorpusError("translate_word: not a pivot surface id");
  return word_ids_[index_of(lang)][static_cast<std::size_t>(it - pivot_ids.begin())];
}

TokenSequence SceneRenderer::render_text(const Scene& scene, Language lang) const {
  validate(scene);
  const std::size_t agent_base = 2;
  const std::size_t action_base = agent_base + inventory_.agents;
  const std::size_t object_base = action_base + inventory_.actions;
  const std::size_t modifier_base = object_base + inventory_.objects;
  const std::array<std::size_t, kSentenceSlots> pivot{kTheSlot,
                                                      agent_base + scene.agent,
                                                      action_base + scene.action,
                                                      kASlot,
                                                      modifier_base + scene.modifier,
                                                      object_base + scene.object};
  const auto& order = word_order(lang);
  const auto& ids = word_ids_[index_of(lang)];
  TokenSequence seq{lang, {}};
  seq.ids.reserve(kSentenceSlots + 1);
  for (std::size_t i = 0; i < kSentenceSlots; ++i) seq.ids.push_back(ids[pivot[order[i]]]);
  seq.ids.push_back(token::kEos);
  return seq;
}

VisionItem SceneRenderer::render_vision(const Scene& scene, std::size_t frames, float jitter,
                                        std::uint64_t seed) const {
  validate(scene);
  if (frames == 0) throw CorpusError("render_vision: frames must be >= 1");
  if (!(jitter >= 0.0f)) throw CorpusError("render_vision: jitter must be >= 0");
  const std::array<std::size_t, 4> active{
      scene.agent, inventory_.agents + scene.action, inventory_.agents + inventory_.actions + scene.object,
      inventory_.agents + inventory_.actions + inventory_.objects + scene.modifier};
  std::vector<float> base(vision_dim_, 0.0f);
  for (std::size_t a : active) {
    for (std::size_t j = 0; j < vision_dim_; ++j) base[j] += projection_[a * vision_dim_ + j];
  }
  VisionItem item{frames, vision_dim_, {}};
  item.values.resize(frames * vision_dim_);
  Rng rng(seed);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t j = 0; j < vision_dim_; ++j) {
      const float noise = jitter > 0.0f ? static_cast<float>(rng.normal()) * jitter : 0.0f;
      item.values[f * vision_dim_ + j] = base[j] + noise;
    }
  }
  return item;
}

const PairSet& Corpus::pairset(Language partner) const {
  if (partner == Language::kL0) throw CorpusError("the pivot language has no cross-lingual pair set");
  return pairsets[index_of(partner)];
}

Partition partition_scenes(std::size_t scene_count, std::size_t test, std::uint64_t seed) {
  if (test == 0) throw CorpusError("partition: test size must be positive");
  if (scene_count < 8 * test) {
    throw CorpusError("partition: " + std::to_string(scene_count) + " scenes are insufficient for test size " +
                      std::to_string(test) + " (need at least " + std::to_string(8 * test) + ")");
  }
  std::vector<std::size_t> order(scene_count);
  for (std::size_t i = 0; i < scene_count; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  Partition p;
  p.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test));
  const std::size_t block = (scene_count - test) / 4;
  for (std::size_t k = 0; k < 4; ++k) {
    auto begin = order.begin() + static_cast<std::ptrdiff_t>(test + k * block);
    p.train[k].assign(begin, begin + static_cast<std::ptrdiff_t>(block));
    std::sort(p.train[k].begin(), p.train[k].end());
  }
  std::sort(p.test.begin(), p.test.end());
  return p;
}

Corpus generate_corpus(const CorpusConfig& config) {
  if (config.max_len < kSentenceSlots + 1) throw CorpusError("max_len too small for the sentence template");
  SceneRenderer renderer(config.seed, config.inventory, config.vision_dim);
  Corpus corpus;
  corpus.config = config;
  corpus.vocab = renderer.vocab();
  corpus.scenes = gen_scenes(derive_seed(config.seed, 1), config.scenes, config.inventory);
  const Partition part = partition_scenes(config.scenes, config.test, derive_seed(config.seed, 2));

  auto vision_of = [&](std::size_t id) {
    return renderer.render_vision(corpus.scenes[id], config.frames, config.jitter, derive_seed(config.seed, 1000 + id));
  };

  for (std::size_t k = 0; k < 4; ++k) {
    PairSet& set = corpus.pairsets[k];
    set.name = "D" + std::to_string(k + 1);
    if (k == 0) {
      set.a = Domain::Vision();
      set.b = Domain::Text(Language::kL0);
    } else {
      set.a = Domain::Text(Language::kL0);
      set.b = Domain::Text(static_cast<Language>(k));
    }
    for (std::size_t id : part.train[k]) {
      PairRecord rec;
      rec.scene_id = id;
      if (k == 0) {
        rec.vision = vision_of(id);
      } else {
        rec.a_text = renderer.render_text(corpus.scenes[id], Language::kL0);
      }
      rec.b_text = renderer.render_text(corpus.scenes[id], set.b.lang);
      set.pairs.push_back(std::move(rec));
    }
  }

  corpus.test.scene_ids = part.test;
  for (std::size_t id : part.test) {
    corpus.test.vision.push_back(vision_of(id));
    for (Language l : kAllLanguages) corpus.test.text[index_of(l)].push_back(renderer.render_text(corpus.scenes[id], l));
  }

  std::vector<std::size_t> train_ids;
  for (const auto& block : part.train) train_ids.insert(train_ids.end(), block.begin(), block.end());
  std::sort(train_ids.begin(), train_ids.end());
  for (std::size_t id : train_ids) {
    DownstreamRecord rec;
    rec.scene_id = id;
    rec.vision = vision_of(id);
    for (Language l : kAllLanguages) rec.text[index_of(l)] = renderer.render_text(corpus.scenes[id], l);
    corpus.downstream.push_back(std::move(rec));
  }
  return corpus;
}

TokenSequence mask_tokens(const TokenSequence& seq, double percent, std::uint64_t seed, const Vocab& vocab,
                          const MaskingScheme& scheme) {
  if (!(percent >= 0.0 && percent <= 100.0)) throw CorpusError("mask_tokens: percent must be in [0, 100]");
  TokenSequence out = seq;
  if (percent == 0.0) return out;
  Rng rng(seed);
  const auto& candidates = vocab.surface_ids(seq.lang);
  const double p = percent / 100.0;
  for (auto& id : out.ids) {
    if (!vocab.is_surface(id)) continue;
    if (!rng.bernoulli(p)) continue;
    const double u = rng.uniform();
    if (u < scheme.mask) {
      id = token::kMask;
    } else if (u < scheme.mask + scheme.random && !candidates.empty()) {
      id = candidates[rng.uniform_int(candidates.size())];
    }
  }
  return out;
}

}  // namespace latentbridge
