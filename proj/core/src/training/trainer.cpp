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

#include "latentbridge/training/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "latentbridge/numerics/ops.hpp"
#include "latentbridge/numerics/random.hpp"
#include "latentbridge/numerics/tape.hpp"
#include "latentbridge/objectives/objectives.hpp"
#include "latentbridge/training/optimizer.hpp"

namespace latentbridge {
namespace {

// Seed streams below the per-epoch range.
constexpr std::uint64_t kFinetuneSampleStream = 7;
constexpr std::uint64_t kEpochStreamBase = 1000;

AdamWConfig adam_config(const TrainConfig& cfg) {
  AdamWConfig a;
  a.learning_rate = cfg.learning_rate;
  a.warmup_steps = cfg.warmup_steps;
  a.weight_decay = cfg.weight_decay;
  return a;
}

std::uint64_t epoch_seed(const TrainConfig& cfg, std::size_t epoch, std::uint64_t stream) {
  return derive_seed(derive_seed(cfg.seed, kEpochStreamBase + epoch), stream);
}

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  return order;
}

// Batch b of an ordering, clipped at its end.
std::span<const std::size_t> batch_of(const std::vector<std::size_t>& order, std::size_t b, std::size_t size) {
  const std::size_t begin = b * size;
  return std::span<const std::size_t>(order).subspan(begin, std::min(size, order.size() - begin));
}

std::size_t batch_count(std::size_t n, std::size_t size) { return (n + size - 1) / size; }

// Runs one optimization step on the loss built by make_loss and returns its value.
template <typename MakeLoss>
double train_step(AdamW& opt, MakeLoss&& make_loss) {
  Tape tape;
  float value = 0.0f;
  {
    TapeScope scope(tape);
    Tensor loss = make_loss();
    value = loss.item();
    tape.backward(loss);
  }
  opt.step();
  return value;
}

void finish_epoch(TrainResult& result, const TrainConfig& cfg, std::size_t epoch, double total, std::size_t batches,
                  const EpochCallback& on_epoch) {
  const double mean = batches > 0 ? total / static_cast<double>(batches) : 0.0;
  result.epoch_losses.push_back(mean);
  if (on_epoch) on_epoch(EpochLog{epoch + 1, cfg.stage, mean});
}

std::vector<TokenSequence> pivot_pool(const Corpus& corpus) {
  std::vector<TokenSequence> pool;
  for (const auto& p : corpus.pairsets[0].pairs) pool.push_back(p.b_text);
  for (std::size_t k = 1; k < corpus.pairsets.size(); ++k) {
    for (const auto& p : corpus.pairsets[k].pairs) pool.push_back(p.a_text);
  }
  return pool;
}

std::vector<TokenSequence> language_pool(const Corpus& corpus, Language lang) {
  if (lang == Language::kL0) return pivot_pool(corpus);
  std::vector<TokenSequence> pool;
  for (const auto& p : corpus.pairset(lang).pairs) pool.push_back(p.b_text);
  return pool;
}

}  // namespace

TrainResult train_vision_alignment(Model& model, const Corpus& corpus, const TrainConfig& cfg,
                                   const EpochCallback& on_epoch) {
  cfg.validate();
  const auto& pairs = corpus.pairsets[0].pairs;
  if (pairs.empty()) throw TrainingError("align-vision: pair set D1 is empty");
  model.params().train_only({SubNetwork::kVision, SubNetwork::kPivot});
  AdamW opt(model.params(), adam_config(cfg));

  TrainResult result;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = shuffled(pairs.size(), epoch_seed(cfg, epoch, 0));
    const std::size_t batches = batch_count(order.size(), cfg.batch_align);
    double total = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<VisionItem> vision;
      std::vector<TokenSequence> text;
      for (auto i : batch_of(order, b, cfg.batch_align)) {
        vision.push_back(pairs[i].vision);
        text.push_back(pairs[i].b_text);
      }
      total += train_step(opt, [&] {
        return cda_loss(model.encode_pivot(text), model.encode_vision(vision), cfg.weights);
      });
    }
    result.steps += batches;
    finish_epoch(result, cfg, epoch, total, batches, on_epoch);
  }
  return result;
}

TrainResult train_crosslingual_alignment(Model& model, const Corpus& corpus, const TrainConfig& cfg,
                                         const EpochCallback& on_epoch) {
  cfg.validate();
  const bool self_pairs = cfg.pivot_self_pairs && cfg.uses(Language::kL0);
  // Pair sets contributing at least one term: the partner side when its
  // language is in use, the pivot side when self pairs are on.
  std::vector<Language> partners;
  for (Language lang : {Language::kL1, Language::kL2, Language::kL3}) {
    if (cfg.uses(lang) || self_pairs) partners.push_back(lang);
  }
  if (partners.empty()) throw TrainingError("align-lingual: no language besides the pivot is in use");
  for (Language lang : partners) {
    if (corpus.pairset(lang).pairs.empty()) {
      throw TrainingError("align-lingual: pair set " + corpus.pairset(lang).name + " is empty");
    }
  }
  model.params().train_only({SubNetwork::kMulti});
  AdamW opt(model.params(), adam_config(cfg));

  TrainResult result;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::vector<std::size_t>> orders;
    std::size_t rounds = 0;
    for (Language lang : partners) {
      orders.push_back(shuffled(corpus.pairset(lang).pairs.size(), epoch_seed(cfg, epoch, index_of(lang))));
      rounds = std::max(rounds, batch_count(orders.back().size(), cfg.batch_align));
    }
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t round = 0; round < rounds; ++round) {
      for (std::size_t k = 0; k < partners.size(); ++k) {
        if (round >= batch_count(orders[k].size(), cfg.batch_align)) continue;
        const Language lang = partners[k];
        const auto& pairs = corpus.pairset(lang).pairs;
        std::vector<TokenSequence> pivot, partner;
        for (auto i : batch_of(orders[k], round, cfg.batch_align)) {
          pivot.push_back(pairs[i].a_text);
          partner.push_back(pairs[i].b_text);
        }
        total += train_step(opt, [&] {
          Tensor target = model.encode_pivot(pivot);
          Tensor loss;
          if (cfg.uses(lang)) loss = cda_loss(target, model.encode_multi(partner), cfg.weights);
          if (self_pairs) {
            Tensor self = cda_loss(target, model.encode_multi(pivot), cfg.weights);
            loss = loss.defined() ? ops::scale(ops::add(loss, self), 0.5f) : self;
          }
          return loss;
        });
        ++batches;
      }
    }
    result.steps += batches;
    finish_epoch(result, cfg, epoch, total, batches, on_epoch);
  }
  return result;
}

TrainResult train_dlr(Model& model, const Corpus& corpus, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  std::vector<std::vector<TokenSequence>> pools;
  std::size_t smallest = SIZE_MAX;
  for (Language lang : cfg.languages) {
    pools.push_back(language_pool(corpus, lang));
    if (pools.back().empty()) throw TrainingError("dlr: no sentences for " + std::string(language_tag(lang)));
    smallest = std::min(smallest, pools.back().size());
  }
  if (cfg.train_encoder_in_dlr) {
    model.params().train_only({SubNetwork::kDecoder, SubNetwork::kMulti});
  } else {
    model.params().train_only({SubNetwork::kDecoder});
  }
  AdamW opt(model.params(), adam_config(cfg));
  // Every language contributes the same number of batches per epoch.
  const std::size_t rounds = batch_count(smallest, cfg.batch_dlr);

  TrainResult result;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::vector<std::size_t>> orders;
    for (std::size_t k = 0; k < pools.size(); ++k) {
      orders.push_back(shuffled(pools[k].size(), epoch_seed(cfg, epoch, index_of(cfg.languages[k]))));
      orders.back().resize(std::min(orders.back().size(), smallest));
    }
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t round = 0; round < rounds; ++round) {
      for (std::size_t k = 0; k < pools.size(); ++k) {
        const std::uint64_t batch_seed = epoch_seed(cfg, epoch, 16 + batches);
        std::vector<TokenSequence> clean, corrupted;
        for (auto i : batch_of(orders[k], round, cfg.batch_dlr)) {
          clean.push_back(pools[k][i]);
          corrupted.push_back(mask_tokens(pools[k][i], cfg.mask_percent, derive_seed(batch_seed, clean.size()),
                                          corpus.vocab));
        }
        total += train_step(opt, [&] {
          Tensor coords = model.encode_multi(corrupted);
          Tensor noisy = perturb_coordinates(coords, cfg.noise_std, derive_seed(batch_seed, 0), cfg.renormalize_noise);
          return dlr_loss(model, noisy, clean);
        });
        ++batches;
      }
    }
    result.steps += batches;
    finish_epoch(result, cfg, epoch, total, batches, on_epoch);
  }
  return result;
}

TrainResult finetune_supervised(Model& model, const Corpus& corpus, const TrainConfig& cfg,
                                const EpochCallback& on_epoch) {
  cfg.validate();
  const auto& pool = corpus.downstream;
  const auto count = static_cast<std::size_t>(cfg.finetune_ratio * static_cast<double>(pool.size()));
  TrainResult result;
  if (count == 0) return result;

  auto order = shuffled(pool.size(), derive_seed(cfg.seed, kFinetuneSampleStream));
  order.resize(count);
  std::sort(order.begin(), order.end());
  result.examples = count;

  model.params().train_only({SubNetwork::kDecoder});
  // The vision encoder is frozen, so coordinates are computed once.
  std::vector<VisionItem> vision;
  std::vector<TokenSequence> text;
  for (auto i : order) {
    vision.push_back(pool[i].vision);
    text.push_back(pool[i].text[index_of(cfg.finetune_lang)]);
  }
  Tensor coords;
  {
    NoGradScope no_grad;
    coords = model.encode_vision(vision);
  }
  AdamW opt(model.params(), adam_config(cfg));
  const std::size_t d = model.config().d;
  // Unpaired reconstruction batches in the target language, interleaved
  // with the labeled ones.
  const std::vector<TokenSequence> replay = language_pool(corpus, cfg.finetune_lang);
  const auto replay_order = shuffled(replay.size(), derive_seed(cfg.seed, kFinetuneSampleStream + 1));
  const std::size_t replay_batches = batch_count(replay.size(), cfg.batch_dlr);
  std::size_t replay_batch = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batch_order = shuffled(count, epoch_seed(cfg, epoch, 0));
    const std::size_t batches = batch_count(count, cfg.batch_dlr);
    double total = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<float> rows;
      std::vector<TokenSequence> targets;
      for (auto i : batch_of(batch_order, b, cfg.batch_dlr)) {
        auto row = coords.data().subspan(i * d, d);
        rows.insert(rows.end(), row.begin(), row.end());
        targets.push_back(text[i]);
      }
      Tensor batch = Tensor::from_data({targets.size(), d}, std::move(rows));
      std::vector<TokenSequence> clean, corrupted;
      const std::uint64_t batch_seed = epoch_seed(cfg, epoch, 16 + b);
      if (cfg.finetune_replay) {
        for (auto i : batch_of(replay_order, replay_batch++ % replay_batches, cfg.batch_dlr)) {
          clean.push_back(replay[i]);
          corrupted.push_back(mask_tokens(replay[i], cfg.mask_percent, derive_seed(batch_seed, clean.size()),
                                          corpus.vocab));
        }
      }
      total += train_step(opt, [&] {
        Tensor loss = dlr_loss(model, batch, targets);
        if (clean.empty()) return loss;
        Tensor noisy = perturb_coordinates(model.encode_multi(corrupted), cfg.noise_std, derive_seed(batch_seed, 0),
                                           cfg.renormalize_noise);
        return ops::add(loss, dlr_loss(model, noisy, clean));
      });
    }
    result.steps += batches;
    finish_epoch(result, cfg, epoch, total, batches, on_epoch);
  }
  return result;
}

TrainResult run_stage(Model& model, const Corpus& corpus, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  switch (cfg.stage) {
    case Stage::kAlignVision: return train_vision_alignment(model, corpus, cfg, on_epoch);
    case Stage::kAlignLingual: return train_crosslingual_alignment(model, corpus, cfg, on_epoch);
    case Stage::kDlr: return train_dlr(model, corpus, cfg, on_epoch);
    case Stage::kFinetune: return finetune_supervised(model, corpus, cfg, on_epoch);
  }
  throw TrainingError("unknown stage");
}

std::optional<Stage> required_stage(Stage stage) {
  switch (stage) {
    case Stage::kAlignVision: return std::nullopt;
    case Stage::kAlignLingual: return Stage::kAlignVision;
    case Stage::kDlr: return Stage::kAlignLingual;
    case Stage::kFinetune: return Stage::kDlr;
  }
  return std::nullopt;
}

}  // namespace latentbridge
