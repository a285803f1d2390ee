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

#include "latentbridge/evaluation/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace latentbridge {
namespace {

template <typename T>
using Sentence = std::vector<T>;

template <typename T>
std::map<Sentence<T>, std::size_t> ngram_counts(const Sentence<T>& s, std::size_t n) {
  std::map<Sentence<T>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[Sentence<T>(s.begin() + i, s.begin() + i + n)];
  return counts;
}

template <typename T>
double corpus_bleu(std::span<const Sentence<T>> cands, std::span<const Sentence<T>> refs) {
  if (cands.size() != refs.size()) {
    throw MetricError("bleu4: " + std::to_string(cands.size()) + " candidates vs " + std::to_string(refs.size()) +
                      " references");
  }
  if (cands.empty()) throw MetricError("bleu4: empty corpus");
  std::size_t matched[4] = {0, 0, 0, 0};
  std::size_t total[4] = {0, 0, 0, 0};
  std::size_t cand_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    cand_len += cands[i].size();
    ref_len += refs[i].size();
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto c = ngram_counts(cands[i], n);
      const auto r = ngram_counts(refs[i], n);
      for (const auto& [gram, count] : c) {
        total[n - 1] += count;
        auto it = r.find(gram);
        if (it != r.end()) matched[n - 1] += std::min(count, it->second);
      }
    }
  }
  if (matched[0] == 0 || cand_len == 0) return 0.0;
  double log_sum = std::log(double(matched[0]) / double(total[0]));
  for (std::size_t n = 1; n < 4; ++n) {
    const double p = matched[n] == 0 ? 1.0 / double(total[n] + 1) : double(matched[n]) / double(total[n]);
    log_sum += std::log(p);
  }
  const double bp = cand_len > ref_len ? 1.0 : std::exp(1.0 - double(ref_len) / double(cand_len));
  return bp * std::exp(log_sum / 4.0);
}

template <typename T>
std::size_t lcs_length(const Sentence<T>& a, const Sentence<T>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

template <typename T>
double rouge(const Sentence<T>& cand, std::span<const Sentence<T>> refs) {
  if (refs.empty()) throw MetricError("rouge_l: no references");
  constexpr double kBeta2 = 1.2 * 1.2;
  double best = 0.0;
  for (const auto& ref : refs) {
    if (cand.empty() && ref.empty()) throw MetricError("rouge_l: empty candidate and reference");
    const std::size_t lcs = lcs_length(cand, ref);
    if (lcs == 0) continue;
    const double p = double(lcs) / double(cand.size());
    const double r = double(lcs) / double(ref.size());
    best = std::max(best, (1.0 + kBeta2) * p * r / (r + kBeta2 * p));
  }
  return best;
}

template <typename T>
double corpus_rouge(std::span<const Sentence<T>> cands, std::span<const Sentence<T>> refs) {
  if (cands.size() != refs.size()) throw MetricError("rouge_l: candidate and reference counts differ");
  if (cands.empty()) throw MetricError("rouge_l: empty corpus");
  double sum = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i) sum += rouge(cands[i], refs.subspan(i, 1));
  return sum / double(cands.size());
}

std::vector<Sentence<std::int32_t>> all_content(std::span<const TokenSequence> seqs) {
  std::vector<Sentence<std::int32_t>> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(content_ids(s));
  return out;
}

nlohmann::ordered_json scores_json(double bleu, double rouge_l, std::size_t samples) {
  nlohmann::ordered_json j;
  j["bleu4"] = bleu;
  j["rougeL"] = rouge_l;
  j["samples"] = samples;
  return j;
}

}  // namespace

std::vector<std::int32_t> content_ids(const TokenSequence& seq) {
  std::vector<std::int32_t> out;
  for (auto id : seq.ids) {
    if (id >= token::kFirstSurface) out.push_back(id);
  }
  return out;
}

Words split_words(const std::string& line) {
  Words words;
  std::istringstream in(line);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

double bleu4(std::span<const Words> candidates, std::span<const Words> references) {
  return corpus_bleu<std::string>(candidates, references);
}

double bleu4(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references) {
  const auto c = all_content(candidates);
  const auto r = all_content(references);
  return corpus_bleu<std::int32_t>(c, r);
}

double rouge_l(const Words& candidate, std::span<const Words> references) {
  return rouge<std::string>(candidate, references);
}

double rouge_l(const TokenSequence& candidate, std::span<const TokenSequence> references) {
  return rouge<std::int32_t>(content_ids(candidate), all_content(references));
}

double corpus_rouge_l(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references) {
  const auto c = all_content(candidates);
  const auto r = all_content(references);
  return corpus_rouge<std::int32_t>(c, r);
}

double corpus_rouge_l(std::span<const Words> candidates, std::span<const Words> references) {
  return corpus_rouge<std::string>(candidates, references);
}

double language_purity(std::span<const TokenSequence> outputs, Language lang, const Vocab& vocab) {
  std::size_t surface = 0, in_lang = 0;
  for (const auto& s : outputs) {
    for (auto id : content_ids(s)) {
      ++surface;
      if (vocab.is_surface(id) && vocab.language_of(id) == lang) ++in_lang;
    }
  }
  return surface == 0 ? 1.0 : double(in_lang) / double(surface);
}

double token_accuracy(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references) {
  if (candidates.size() != references.size()) throw MetricError("token_accuracy: count mismatch");
  std::size_t hits = 0, total = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto c = content_ids(candidates[i]);
    const auto r = content_ids(references[i]);
    total += std::max(c.size(), r.size());
    for (std::size_t t = 0; t < std::min(c.size(), r.size()); ++t) hits += c[t] == r[t];
  }
  return total == 0 ? 1.0 : double(hits) / double(total);
}

double exact_match(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references) {
  if (candidates.size() != references.size()) throw MetricError("exact_match: count mismatch");
  if (candidates.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) hits += content_ids(candidates[i]) == content_ids(references[i]);
  return double(hits) / double(candidates.size());
}

MetricScores score_corpus(std::span<const TokenSequence> candidates, std::span<const TokenSequence> references) {
  return MetricScores{bleu4(candidates, references), corpus_rouge_l(candidates, references), candidates.size()};
}

std::string to_json_text(const MetricReport& report) {
  nlohmann::ordered_json j = scores_json(report.bleu4, report.rougeL, report.samples);
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [lang, s] : report.per_language) per[lang] = scores_json(s.bleu4, s.rougeL, s.samples);
  j["per_language"] = per;
  return j.dump(2);
}

}  // namespace latentbridge
