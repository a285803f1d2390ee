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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "latentbridge/evaluation/diagnostics.hpp"
#include "latentbridge/evaluation/metrics.hpp"
#include "latentbridge/numerics/random.hpp"

namespace latentbridge {
namespace {

Words w(const char* s) { return split_words(s); }

TEST(BleuTest, HandCountedCase) {
  const std::vector<Words> cand{w("a b c d e f")};
  const std::vector<Words> ref{w("a b c d x y")};
  const double expected = std::pow((4.0 / 6) * (3.0 / 5) * (2.0 / 4) * (1.0 / 3), 0.25);
  EXPECT_NEAR(bleu4(cand, ref), expected, 1e-12);
  EXPECT_NEAR(bleu4(cand, ref), 0.508, 1e-3);
}

TEST(BleuTest, IdentityAndNoOverlap) {
  const std::vector<Words> a{w("a b c d e"), w("x y z w v u")};
  EXPECT_DOUBLE_EQ(bleu4(a, a), 1.0);
  const std::vector<Words> none{w("p q r s t"), w("k l m n o j")};
  EXPECT_EQ(bleu4(none, a), 0.0);
}

TEST(BleuTest, SmoothsOnlyHigherOrders) {
  // p1 = 2/4, p2 = 1/3, p3 = 0 -> 1/3, p4 = 0 -> 1/2.
  const std::vector<Words> cand{w("a b c d")};
  const std::vector<Words> ref{w("a b x y")};
  EXPECT_NEAR(bleu4(cand, ref), std::pow(0.5 * (1.0 / 3) * (1.0 / 3) * 0.5, 0.25), 1e-12);
}

TEST(BleuTest, BrevityPenalty) {
  const std::vector<Words> cand{w("a b")};
  const std::vector<Words> ref{w("a b c d")};
  EXPECT_NEAR(bleu4(cand, ref), std::exp(1.0 - 2.0), 1e-12);
}

TEST(BleuTest, CorpusOrderDoesNotMatter) {
  const std::vector<Words> cand{w("a b c d e"), w("q r s"), w("m n o p")};
  const std::vector<Words> ref{w("a b c x e"), w("q r t"), w("m n o p q")};
  const std::vector<Words> cand2{cand[2], cand[0], cand[1]};
  const std::vector<Words> ref2{ref[2], ref[0], ref[1]};
  EXPECT_DOUBLE_EQ(bleu4(cand, ref), bleu4(cand2, ref2));
}

TEST(BleuTest, Errors) {
  const std::vector<Words> one{w("a")};
  const std::vector<Words> two{w("a"), w("b")};
  EXPECT_THROW(bleu4(one, two), MetricError);
  EXPECT_THROW(bleu4(std::vector<Words>{}, std::vector<Words>{}), MetricError);
}

TEST(BleuTest, TokenSequencesIgnoreReservedIds) {
  const std::vector<TokenSequence> cand{{Language::kL1, {9, 10, 11, 12, 1}}};
  const std::vector<TokenSequence> ref{{Language::kL1, {9, 10, 11, 12, 1}}};
  EXPECT_DOUBLE_EQ(bleu4(cand, ref), 1.0);
}

TEST(RougeTest, HandCases) {
  const std::vector<Words> ref{w("a c b")};
  EXPECT_NEAR(rouge_l(w("a b c"), ref), 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(rouge_l(w("a c b"), ref), 1.0);
  EXPECT_EQ(rouge_l(w("x y"), ref), 0.0);
  const std::vector<Words> refs{w("x y z"), w("a c b")};
  EXPECT_DOUBLE_EQ(rouge_l(w("a c b"), refs), 1.0);
  EXPECT_THROW(rouge_l(w("a"), std::vector<Words>{}), MetricError);
  EXPECT_THROW(rouge_l(Words{}, std::vector<Words>{Words{}}), MetricError);
}

TEST(RougeTest, UnequalPrecisionRecallUsesBeta) {
  // LCS 2, P = 2/2, R = 2/4.
  const double p = 1.0, r = 0.5, b2 = 1.44;
  EXPECT_NEAR(rouge_l(w("a b"), std::vector<Words>{w("a x b y")}), (1 + b2) * p * r / (r + b2 * p), 1e-12);
}

TEST(MetricsTest, PurityAccuracyAndJson) {
  Vocab vocab({std::vector<std::string>{"a0", "b0"}, {"a1", "b1"}, {"a2", "b2"}, {"a3", "b3"}});
  const std::vector<TokenSequence> out{{Language::kL1, {vocab.id("a1"), vocab.id("b1"), 1}},
                                       {Language::kL1, {vocab.id("a1"), vocab.id("a2"), 1}}};
  EXPECT_DOUBLE_EQ(language_purity(out, Language::kL1, vocab), 0.75);
  const std::vector<TokenSequence> ref{{Language::kL1, {vocab.id("a1"), vocab.id("b1"), 1}},
                                       {Language::kL1, {vocab.id("a1"), vocab.id("b1"), 1}}};
  EXPECT_DOUBLE_EQ(token_accuracy(out, ref), 0.75);
  EXPECT_DOUBLE_EQ(exact_match(out, ref), 0.5);

  MetricReport report;
  report.bleu4 = 0.5;
  report.rougeL = 0.25;
  report.samples = 2;
  report.per_language["L1"] = MetricScores{0.5, 0.25, 2};
  const auto j = nlohmann::json::parse(to_json_text(report));
  EXPECT_EQ(j.at("bleu4"), 0.5);
  EXPECT_EQ(j.at("rougeL"), 0.25);
  EXPECT_EQ(j.at("samples"), 2);
  EXPECT_EQ(j.at("per_language").at("L1").at("samples"), 2);
}

std::vector<LatentCoordinate> basis(std::size_t n) {
  std::vector<LatentCoordinate> out;
  for (std::size_t i = 0; i < n; ++i) {
    LatentCoordinate c{std::vector<float>(n, 0.0f)};
    c.values[i] = 1.0f;
    out.push_back(c);
  }
  return out;
}

TEST(RetrievalTest, IdenticalSetsAreFullyRecalled) {
  Rng rng(1);
  std::vector<LatentCoordinate> a;
  for (int i = 0; i < 20; ++i) {
    LatentCoordinate c{std::vector<float>(8)};
    for (auto& v : c.values) v = static_cast<float>(rng.normal());
    a.push_back(c);
  }
  const auto r = retrieval_diagnostics(a, a);
  EXPECT_DOUBLE_EQ(r.recall_at_1, 1.0);
  EXPECT_DOUBLE_EQ(r.recall_at_5, 1.0);
  EXPECT_NEAR(r.matched_cosine, 1.0, 1e-6);
}

TEST(RetrievalTest, ShuffledOrthonormalSetRecallsFixedPoints) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto a = basis(12);
    std::vector<std::size_t> perm(12);
    for (std::size_t i = 0; i < 12; ++i) perm[i] = i;
    Rng rng(seed);
    rng.shuffle(perm);
    std::vector<LatentCoordinate> b;
    std::size_t fixed = 0;
    for (std::size_t i = 0; i < 12; ++i) {
      b.push_back(a[perm[i]]);
      fixed += perm[i] == i;
    }
    const auto r = retrieval_diagnostics(a, b);
    EXPECT_DOUBLE_EQ(r.recall_at_1, double(fixed) / 12.0) << "seed " << seed;
    EXPECT_GE(r.recall_at_5, r.recall_at_1);
  }
}

TEST(RetrievalTest, TiesBreakTowardLowerIndex) {
  // Every similarity is zero: row i ranks behind all j < i.
  std::vector<LatentCoordinate> a = basis(6);
  std::vector<LatentCoordinate> b;
  for (std::size_t i = 0; i < 6; ++i) b.push_back(LatentCoordinate{{0, 0, 0, 0, 0, 0}});
  for (auto& c : b) c.values.push_back(1.0f);
  for (auto& c : a) c.values.push_back(0.0f);
  const auto r = retrieval_diagnostics(a, b);
  EXPECT_DOUBLE_EQ(r.recall_at_1, 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(r.recall_at_5, 5.0 / 6.0);
}

TEST(RetrievalTest, InvariantUnderCommonRotation) {
  Rng rng(4);
  std::vector<LatentCoordinate> a, b;
  for (int i = 0; i < 15; ++i) {
    LatentCoordinate x{{float(rng.normal()), float(rng.normal())}};
    LatentCoordinate y{{x.values[0] + float(rng.normal()), x.values[1] + float(rng.normal())}};
    a.push_back(x);
    b.push_back(y);
  }
  auto rotate = [](std::vector<LatentCoordinate> v) {
    const float c = std::cos(1.1f), s = std::sin(1.1f);
    for (auto& x : v) x.values = {c * x.values[0] - s * x.values[1], s * x.values[0] + c * x.values[1]};
    return v;
  };
  const auto r1 = retrieval_diagnostics(a, b);
  const auto r2 = retrieval_diagnostics(rotate(a), rotate(b));
  EXPECT_EQ(r1.recall_at_1, r2.recall_at_1);
  EXPECT_EQ(r1.recall_at_5, r2.recall_at_5);
}

TEST(RetrievalTest, Errors) {
  EXPECT_THROW(retrieval_diagnostics(basis(3), basis(2)), MetricError);
  EXPECT_THROW(retrieval_diagnostics(basis(1), basis(1)), MetricError);
  const auto j = nlohmann::json::parse(to_json_text(retrieval_diagnostics(basis(3), basis(3))));
  for (const char* key : {"matched_cosine", "cross_cosine", "recall_at_1", "recall_at_5"}) EXPECT_TRUE(j.contains(key));
}

}  // namespace
}  // namespace latentbridge
