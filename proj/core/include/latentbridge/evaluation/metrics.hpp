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
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "latentbridge/corpus/types.hpp"
#include "latentbridge/corpus/vocab.hpp"

namespace latentbridge {

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Words = std::vector<std::string>;

// Corpus BLEU-4, one reference per candidate. p1 is never smoothed; a zero
// count for n >= 2 becomes (0 + 1) / (total + 1).
double bleu4(std::span<const Words> candidates, std::span<const Words> references);
double bleu4(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references);

// LCS F-measure with beta = 1.2, best over the references.
double rouge_l(const Words& candidate, std::span<const Words> references);
double rouge_l(const TokenSequence& candidate, std::span<const TokenSequence> references);
// Mean sentence-level ROUGE-L over a corpus.
double corpus_rouge_l(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references);
double corpus_rouge_l(std::span<const Words> candidates, std::span<const Words> references);

// Surface tokens of a sequence (EOS, BOS, PAD and MASK dropped).
std::vector<std::int32_t> content_ids(const TokenSequence& seq);
Words split_words(const std::string& line);

// Fraction of generated surface tokens that belong to lang. 1 when there
// are no surface tokens.
double language_purity(std::span<const TokenSequence> outputs, Language lang, const Vocab& vocab);
// Position-wise matches over the longer of each pair, pooled over the corpus.
double token_accuracy(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references);
// Fraction of pairs whose content tokens are identical.
double exact_match(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references);

struct MetricScores {
  double bleu4 = 0.0;
  double rougeL = 0.0;
  std::size_t samples = 0;
};

struct MetricReport {
  double bleu4 = 0.0;
  double rougeL = 0.0;
  std::size_t samples = 0;
  std::map<std::string, MetricScores> per_language;
};

MetricScores score_corpus(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references);
std::string to_json_text(const MetricReport& report);

}  // namespace latentbridge
