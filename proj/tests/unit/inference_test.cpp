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
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "latentbridge/inference/beam_search.hpp"
#include "latentbridge/numerics/random.hpp"

namespace latentbridge {
namespace {

using Prefix = std::vector<std::int32_t>;

// Next-token logits over {0, EOS=1, 2} keyed by the generated prefix.
struct Table {
  std::map<Prefix, std::vector<float>> rows;

  StepFunction step() const {
    return [this](std::span<const Prefix> prefixes) {
      std::vector<std::vector<float>> out;
      for (const auto& p : prefixes) out.push_back(rows.at(Prefix(p.begin() + 1, p.end())));
      return out;
    };
  }

  double log_prob(const Prefix& generated, std::size_t upto) const {
    double lp = 0.0;
    for (std::size_t t = 0; t < upto; ++t) {
      const auto& row = rows.at(Prefix(generated.begin(), generated.begin() + t));
      double z = 0.0;
      for (float v : row) z += std::exp(double(v));
      lp += row[static_cast<std::size_t>(generated[t])] - std::log(z);
    }
    return lp;
  }
};

Table random_table(std::uint64_t seed) {
  Rng rng(seed);
  Table t;
  auto row = [&] { return std::vector<float>{float(rng.normal() * 2), float(rng.normal() * 2), float(rng.normal() * 2)}; };
  t.rows[{}] = row();
  for (std::int32_t a : {0, 2}) t.rows[{a}] = row();
  return t;
}

// All outputs reachable with max_len = 2: sequences ending in EOS, or two
// non-EOS tokens followed by a forced EOS.
std::pair<Prefix, double> enumerate_best(const Table& t) {
  std::vector<Prefix> all{{1}};
  for (std::int32_t a : {0, 2}) {
    all.push_back({a, 1});
    for (std::int32_t b : {0, 2}) all.push_back({a, b});
  }
  Prefix best;
  double best_lp = -INFINITY;
  for (const auto& s : all) {
    const double lp = t.log_prob(s, s.size());
    if (lp > best_lp || (lp == best_lp && s < best)) {
      best = s;
      best_lp = lp;
    }
  }
  if (best.back() != 1) best.push_back(1);
  return {best, best_lp};
}

class EnumerationTest : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(EnumerationTest, BeamMatchesExhaustiveSearch) {
  const Table t = random_table(GetParam());
  const auto [expected, expected_lp] = enumerate_best(t);
  const DecodeResult r = beam_search(t.step(), Language::kL1, DecodeConfig{3, 2, 0.0f});
  EXPECT_EQ(r.sequence.ids, expected);
  EXPECT_NEAR(r.log_prob, expected_lp, 1e-9);
  EXPECT_EQ(r.forced_eos, expected.size() == 3 && expected[1] != 1);
}

INSTANTIATE_TEST_SUITE_P(Tables, EnumerationTest, ::testing::Range<std::uint64_t>(1, 51));

TEST(BeamSearchTest, HandTableWhereGreedyLoses) {
  // Greedy takes 0 first (p=0.5) and then has to end weakly; the best path
  // starts with 2.
  Table t;
  t.rows[{}] = {std::log(0.5f), std::log(0.1f), std::log(0.4f)};
  t.rows[{0}] = {std::log(0.34f), std::log(0.33f), std::log(0.33f)};
  t.rows[{2}] = {std::log(0.05f), std::log(0.9f), std::log(0.05f)};
  const auto beam = beam_search(t.step(), Language::kL0, DecodeConfig{3, 2, 0.0f});
  EXPECT_EQ(beam.sequence.ids, (Prefix{2, 1}));
  EXPECT_NEAR(beam.log_prob, std::log(0.4 * 0.9), 1e-6);
  const auto greedy = beam_search(t.step(), Language::kL0, DecodeConfig{1, 2, 0.0f});
  EXPECT_EQ(greedy.sequence.ids, (Prefix{0, 0, 1}));
  EXPECT_TRUE(greedy.forced_eos);
  EXPECT_GT(beam.log_prob, greedy.log_prob);
}

TEST(BeamSearchTest, TiesGoToLowerTokens) {
  Table t;
  t.rows[{}] = {0.0f, 0.0f, 0.0f};
  const auto r = beam_search(t.step(), Language::kL0, DecodeConfig{3, 1, 0.0f});
  EXPECT_EQ(r.sequence.ids, (Prefix{0, 1}));
  EXPECT_TRUE(r.forced_eos);
}

TEST(BeamSearchTest, ForcedTerminationIsFlagged) {
  const StepFunction never_stop = [](std::span<const Prefix> prefixes) {
    return std::vector<std::vector<float>>(prefixes.size(), std::vector<float>{-5.0f, -5.0f, 5.0f});
  };
  const auto r = beam_search(never_stop, Language::kL2, DecodeConfig{2, 4, 0.0f});
  EXPECT_EQ(r.sequence.ids, (Prefix{2, 2, 2, 2, 1}));
  EXPECT_TRUE(r.forced_eos);
  EXPECT_EQ(r.sequence.lang, Language::kL2);
}

TEST(BeamSearchTest, BannedTokensAreNeverEmitted) {
  Table t = random_table(3);
  for (auto& [k, row] : t.rows) row[0] = 50.0f;
  const std::int32_t banned[] = {0};
  const auto r = beam_search(t.step(), Language::kL0, DecodeConfig{3, 2, 0.0f}, banned);
  for (auto id : r.sequence.ids) EXPECT_NE(id, 0);
}

TEST(BeamSearchTest, LengthNormalizationPrefersLongerAtHighAlpha) {
  Table t;
  t.rows[{}] = {std::log(0.6f), std::log(0.4f), -30.0f};
  t.rows[{0}] = {-30.0f, std::log(0.99f), -30.0f};
  t.rows[{2}] = {0.0f, 0.0f, 0.0f};
  EXPECT_EQ(beam_search(t.step(), Language::kL0, DecodeConfig{3, 2, 0.0f}).sequence.ids, (Prefix{0, 1}));
  t.rows[{}] = {std::log(0.45f), std::log(0.55f), -30.0f};
  EXPECT_EQ(beam_search(t.step(), Language::kL0, DecodeConfig{3, 2, 0.0f}).sequence.ids, (Prefix{1}));
  EXPECT_EQ(beam_search(t.step(), Language::kL0, DecodeConfig{3, 2, 1.0f}).sequence.ids, (Prefix{0, 1}));
}

TEST(DecodeConfigTest, Validation) {
  EXPECT_THROW((DecodeConfig{0, 5, 0.0f}).validate(), DecodeError);
  EXPECT_THROW((DecodeConfig{1, 0, 0.0f}).validate(), DecodeError);
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.d = 16;
  c.heads = 2;
  c.enc_layers = 1;
  c.dec_layers = 1;
  c.ffn_mult = 2;
  c.max_len = 8;
  c.vocab_size = 40;
  c.vision_dim = 4;
  return c;
}

TEST(ModelDecodeTest, BeamOfOneIsGreedy) {
  Model m(tiny_config(), 21);
  // Sharpen the output layer so decoding is not trivially flat.
  Tensor emb = m.params().find("decoder.tok_emb")->value;
  for (auto& v : emb.data()) v *= 40.0f;
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    LatentCoordinate c{std::vector<float>(16)};
    for (auto& v : c.values) v = static_cast<float>(rng.normal());
    const float n = c.norm();
    for (auto& v : c.values) v /= n;
    const auto lang = kAllLanguages[static_cast<std::size_t>(i) % 4];
    const auto beam = beam_search(m, c, lang, DecodeConfig{1, 23, 0.0f});
    const auto greedy = greedy_decode(m, c, lang, 23);
    EXPECT_EQ(beam.sequence, greedy.sequence);
    EXPECT_NEAR(beam.log_prob, greedy.log_prob, 1e-4);
    EXPECT_EQ(beam.forced_eos, greedy.forced_eos);
    const auto wide = beam_search(m, c, lang, DecodeConfig{3, 23, 0.0f});
    EXPECT_EQ(wide.sequence, beam_search(m, c, lang, DecodeConfig{3, 23, 0.0f}).sequence);
    EXPECT_LE(wide.sequence.length(), m.config().max_len);
    EXPECT_EQ(wide.sequence.ids.back(), token::kEos);
    for (auto id : wide.sequence.ids) EXPECT_TRUE(id == token::kEos || id >= token::kFirstSurface);
  }
}

TEST(ModelDecodeTest, CaptionAndTranslateUseTheRequestedLanguage) {
  Model m(tiny_config(), 22);
  const VisionItem v{2, 4, {0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f, 0.7f, 0.8f}};
  const auto cap = caption(m, v, Language::kL3, DecodeConfig{});
  EXPECT_EQ(cap.sequence.lang, Language::kL3);
  EXPECT_EQ(cap.sequence.ids.back(), token::kEos);
  const auto tr = translate(m, TokenSequence{Language::kL1, {9, 10, 1}}, Language::kL2, DecodeConfig{});
  EXPECT_EQ(tr.sequence.lang, Language::kL2);
  EXPECT_THROW(beam_search(m, LatentCoordinate{{1.0f}}, Language::kL0, DecodeConfig{}), DecodeError);
}

}  // namespace
}  // namespace latentbridge
