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

#include <algorithm>
#include <vector>

#include <benchmark/benchmark.h>

#include "latentbridge/corpus/corpus.hpp"
#include "latentbridge/evaluation/metrics.hpp"
#include "latentbridge/inference/beam_search.hpp"
#include "latentbridge/model/model.hpp"
#include "latentbridge/numerics/ops.hpp"
#include "latentbridge/numerics/random.hpp"
#include "latentbridge/numerics/tape.hpp"
#include "latentbridge/objectives/objectives.hpp"

namespace lb = latentbridge;

namespace {

lb::Tensor random_tensor(lb::Shape shape, std::uint64_t seed, bool requires_grad = false) {
  lb::Rng rng(seed);
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  lb::Tensor t = lb::Tensor::from_data(shape, std::move(v));
  t.set_requires_grad(requires_grad);
  return t;
}

const lb::Corpus& small_corpus() {
  static const lb::Corpus corpus = [] {
    lb::CorpusConfig c;
    c.scenes = 400;
    c.test = 40;
    return lb::generate_corpus(c);
  }();
  return corpus;
}

lb::ModelConfig model_config() {
  lb::ModelConfig m;
  m.vocab_size = small_corpus().vocab.size();
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const lb::Tensor a = random_tensor({n, n}, 1), b = random_tensor({n, n}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(lb::ops::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256);

void BM_AttentionForwardBackward(benchmark::State& state) {
  const std::size_t batch = 32, len = 24, d = 64;
  lb::Tensor q = random_tensor({batch * len, d}, 1, true);
  lb::Tensor k = random_tensor({batch * len, d}, 2, true);
  lb::Tensor v = random_tensor({batch * len, d}, 3, true);
  lb::ops::AttentionLayout layout{batch, len, len, 4, true, std::vector<std::size_t>(batch, len)};
  for (auto _ : state) {
    lb::Tape tape;
    lb::TapeScope scope(tape);
    tape.backward(lb::ops::sum(lb::ops::attention(q, k, v, layout)));
  }
}
BENCHMARK(BM_AttentionForwardBackward);

void BM_EncodeMulti(benchmark::State& state) {
  const lb::Model model(model_config(), 1);
  std::vector<lb::TokenSequence> batch;
  for (const auto& p : small_corpus().pairsets[1].pairs) {
    if (batch.size() == 64) break;
    batch.push_back(p.b_text);
  }
  for (auto _ : state) {
    lb::NoGradScope no_grad;
    benchmark::DoNotOptimize(model.encode_multi(batch));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_EncodeMulti);

void BM_DlrStep(benchmark::State& state) {
  lb::Model model(model_config(), 1);
  std::vector<lb::TokenSequence> batch;
  for (const auto& p : small_corpus().pairsets[1].pairs) {
    if (batch.size() == 32) break;
    batch.push_back(p.b_text);
  }
  for (auto _ : state) {
    lb::Tape tape;
    lb::TapeScope scope(tape);
    lb::Tensor coords = lb::perturb_coordinates(model.encode_multi(batch), 0.1f, 3);
    tape.backward(lb::dlr_loss(model, coords, batch));
    model.params().zero_grad();
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_DlrStep);

void BM_BeamSearchCaption(benchmark::State& state) {
  const lb::Model model(model_config(), 1);
  lb::DecodeConfig cfg;
  cfg.beam_size = static_cast<std::size_t>(state.range(0));
  const auto& vision = small_corpus().test.vision;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lb::caption(model, vision[i++ % vision.size()], lb::Language::kL1, cfg));
  }
}
BENCHMARK(BM_BeamSearchCaption)->Arg(1)->Arg(3);

void BM_CorpusBleu(benchmark::State& state) {
  const auto& refs = small_corpus().test.text[1];
  std::vector<lb::TokenSequence> hyps(refs.begin(), refs.end());
  std::rotate(hyps.begin(), hyps.begin() + 1, hyps.end());
  for (auto _ : state) benchmark::DoNotOptimize(lb::bleu4(hyps, refs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(refs.size()));
}
BENCHMARK(BM_CorpusBleu);

}  // namespace

BENCHMARK_MAIN();
