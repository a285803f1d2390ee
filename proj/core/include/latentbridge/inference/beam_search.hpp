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

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "latentbridge/corpus/types.hpp"
#include "latentbridge/model/model.hpp"

namespace latentbridge {

class DecodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DecodeConfig {
  std::size_t beam_size = 3;
  std::size_t max_len = 23;  // decode steps before EOS is forced
  float alpha = 0.0f;        // length-normalization exponent

  void validate() const;
};

struct BeamHypothesis {
  std::vector<std::int32_t> tokens;  // generated tokens, BOS excluded
  double log_prob = 0.0;
  bool finished = false;
};

struct DecodeResult {
  TokenSequence sequence;  // ends with EOS
  double log_prob = 0.0;   // excludes a forced EOS
  bool forced_eos = false;
};

// Returns next-token logits for each prefix; every prefix starts with BOS.
using StepFunction =
    std::function<std::vector<std::vector<float>>(std::span<const std::vector<std::int32_t>> prefixes)>;

// Ranks hypotheses by log_prob / length^alpha; equal scores go to the
// lexicographically smaller token sequence. Finished hypotheses stay in the
// beam and compete with open ones. Tokens listed in `banned` are never
// emitted.
DecodeResult beam_search(const StepFunction& step, Language lang, const DecodeConfig& cfg,
                         std::span<const std::int32_t> banned = {});

// Beam search over the model's decoder conditioned on c. Reserved ids other
// than EOS are banned; max_len is capped so the output fits the model.
DecodeResult beam_search(const Model& model, const LatentCoordinate& c, Language lang, const DecodeConfig& cfg);

// Argmax decoding, written independently of beam_search.
DecodeResult greedy_decode(const Model& model, const LatentCoordinate& c, Language lang, std::size_t max_len);

DecodeResult caption(const Model& model, const VisionItem& v, Language lang, const DecodeConfig& cfg);
DecodeResult translate(const Model& model, const TokenSequence& source, Language target, const DecodeConfig& cfg);

}  // namespace latentbridge
