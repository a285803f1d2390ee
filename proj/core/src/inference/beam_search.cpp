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

#include "latentbridge/inference/beam_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "latentbridge/numerics/kernels.hpp"
#include "latentbridge/numerics/ops.hpp"
#include "latentbridge/numerics/tape.hpp"

namespace latentbridge {
namespace {

double score(const BeamHypothesis& h, float alpha) {
  if (alpha == 0.0f || h.tokens.empty()) return h.log_prob;
  return h.log_prob / std::pow(static_cast<double>(h.tokens.size()), static_cast<double>(alpha));
}

bool better(const BeamHypothesis& a, const BeamHypothesis& b, float alpha) {
  const double sa = score(a, alpha), sb = score(b, alpha);
  if (sa != sb) return sa > sb;
  return a.tokens < b.tokens;
}

std::vector<std::int32_t> reserved_ids() { return {token::kPad, token::kMask, 3, 4, 5, 6}; }

StepFunction model_step(const Model& model, const LatentCoordinate& c) {
  return [&model, &c](std::span<const std::vector<std::int32_t>> prefixes) {
    NoGradScope no_grad;
    const std::vector<LatentCoordinate> coords(prefixes.size(), c);
    Tensor logits = model.decode(stack_coordinates(coords), prefixes);
    std::size_t len = 0;
    for (const auto& p : prefixes) len = std::max(len, p.size());
    const std::size_t vocab = model.config().vocab_size;
    std::vector<std::vector<float>> out;
    for (std::size_t b = 0; b < prefixes.size(); ++b) {
      auto row = logits.data().subspan((b * len + prefixes[b].size() - 1) * vocab, vocab);
      out.emplace_back(row.begin(), row.end());
    }
    return out;
  };
}

DecodeConfig capped(const Model& model, DecodeConfig cfg) {
  cfg.max_len = std::min(cfg.max_len, model.config().max_len - 1);
  return cfg;
}

}  // namespace

void DecodeConfig::validate() const {
  if (beam_size < 1) throw DecodeError("beam_size must be at least 1");
  if (max_len < 1) throw DecodeError("max_len must be at least 1");
  if (!(alpha >= 0.0f)) throw DecodeError("alpha must be non-negative");
}

DecodeResult beam_search(const StepFunction& step, Language lang, const DecodeConfig& cfg,
                         std::span<const std::int32_t> banned) {
  cfg.validate();
  const std::int32_t bos = token::bos(lang);
  std::vector<BeamHypothesis> beams{BeamHypothesis{}};
  for (std::size_t t = 0; t < cfg.max_len; ++t) {
    std::vector<std::vector<std::int32_t>> prefixes;
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < beams.size(); ++i) {
      if (beams[i].finished) continue;
      std::vector<std::int32_t> prefix{bos};
      prefix.insert(prefix.end(), beams[i].tokens.begin(), beams[i].tokens.end());
      prefixes.push_back(std::move(prefix));
      open.push_back(i);
    }
    if (open.empty()) break;
    const auto logits = step(prefixes);
    if (logits.size() != open.size()) throw DecodeError("step function returned the wrong number of rows");

    std::vector<BeamHypothesis> candidates;
    for (const auto& h : beams) {
      if (h.finished) candidates.push_back(h);
    }
    for (std::size_t k = 0; k < open.size(); ++k) {
      const auto& row = logits[k];
      const double lse = kernels::log_sum_exp(row.data(), row.size());
      const auto& parent = beams[open[k]];
      for (std::size_t v = 0; v < row.size(); ++v) {
        const auto id = static_cast<std::int32_t>(v);
        if (std::find(banned.begin(), banned.end(), id) != banned.end()) continue;
        BeamHypothesis h = parent;
        h.tokens.push_back(id);
        h.log_prob += double(row[v]) - lse;
        h.finished = id == token::kEos;
        candidates.push_back(std::move(h));
      }
    }
    const std::size_t keep = std::min(cfg.beam_size, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      [&](const BeamHypothesis& a, const BeamHypothesis& b) { return better(a, b, cfg.alpha); });
    candidates.resize(keep);
    beams = std::move(candidates);
  }

  const auto best = std::min_element(beams.begin(), beams.end(), [&](const BeamHypothesis& a, const BeamHypothesis& b) {
    return better(a, b, cfg.alpha);
  });
  DecodeResult result;
  result.sequence = TokenSequence{lang, best->tokens};
  result.log_prob = best->log_prob;
  if (!best->finished) {
    result.sequence.ids.push_back(token::kEos);
    result.forced_eos = true;
  }
  return result;
}

DecodeResult beam_search(const Model& model, const LatentCoordinate& c, Language lang, const DecodeConfig& cfg) {
  if (c.values.size() != model.config().d) throw DecodeError("coordinate dimension does not match the model");
  const auto banned = reserved_ids();
  return beam_search(model_step(model, c), lang, capped(model, cfg), banned);
}

DecodeResult greedy_decode(const Model& model, const LatentCoordinate& c, Language lang, std::size_t max_len) {
  max_len = std::min(max_len, model.config().max_len - 1);
  const auto banned = reserved_ids();
  std::vector<std::int32_t> prefix{token::bos(lang)};
  DecodeResult result;
  result.sequence.lang = lang;
  for (std::size_t t = 0; t < max_len; ++t) {
    const auto logits = model.decode_step(c, prefix, lang);
    std::int32_t arg = -1;
    for (std::size_t v = 0; v < logits.size(); ++v) {
      const auto id = static_cast<std::int32_t>(v);
      if (std::find(banned.begin(), banned.end(), id) != banned.end()) continue;
      if (arg < 0 || logits[v] > logits[static_cast<std::size_t>(arg)]) arg = id;
    }
    result.log_prob += double(logits[static_cast<std::size_t>(arg)]) -
                       kernels::log_sum_exp(logits.data(), logits.size());
    result.sequence.ids.push_back(arg);
    if (arg == token::kEos) return result;
    prefix.push_back(arg);
  }
  result.sequence.ids.push_back(token::kEos);
  result.forced_eos = true;
  return result;
}

DecodeResult caption(const Model& model, const VisionItem& v, Language lang, const DecodeConfig& cfg) {
  NoGradScope no_grad;
  return beam_search(model, model.encode_vision(v), lang, cfg);
}

DecodeResult translate(const Model& model, const TokenSequence& source, Language target, const DecodeConfig& cfg) {
  NoGradScope no_grad;
  return beam_search(model, model.encode_multi(source), target, cfg);
}

}  // namespace latentbridge
