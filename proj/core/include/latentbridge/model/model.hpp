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
#include <span>
#include <vector>

#include "latentbridge/corpus/types.hpp"
#include "latentbridge/model/config.hpp"
#include "latentbridge/model/parameters.hpp"
#include "latentbridge/numerics/tensor.hpp"

namespace latentbridge {

// A unit-norm point in the shared latent space.
struct LatentCoordinate {
  std::vector<float> values;

  float norm() const;
  float cosine(const LatentCoordinate& other) const;
};

LatentCoordinate row_coordinate(const Tensor& batch, std::size_t row);
Tensor stack_coordinates(std::span<const LatentCoordinate> coords);

struct LayerNormParams {
  Tensor gain;
  Tensor bias;
};

struct AttentionParams {
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;
};

struct FeedForwardParams {
  Tensor w1, b1, w2, b2;
};

struct EncoderLayerParams {
  LayerNormParams ln_attn;
  AttentionParams attn;
  LayerNormParams ln_ffn;
  FeedForwardParams ffn;
};

struct DecoderLayerParams {
  LayerNormParams ln_self;
  AttentionParams self_attn;
  LayerNormParams ln_cross;
  AttentionParams cross_attn;
  LayerNormParams ln_ffn;
  FeedForwardParams ffn;
};

enum class Pooling { kEndToken, kMean };

struct TextEncoderParams {
  Tensor tok_emb, pos_emb;
  std::vector<EncoderLayerParams> layers;
  LayerNormParams ln_final;
  Tensor proj_w, proj_b;
};

struct VisionEncoderParams {
  Tensor fc1_w, fc1_b, fc2_w, fc2_b;
};

struct DecoderParams {
  Tensor tok_emb, pos_emb;  // tok_emb is tied with the output projection
  std::vector<DecoderLayerParams> layers;
  LayerNormParams ln_final;
  Tensor out_bias;
};

// Vision encoder, pivot text encoder, multilingual encoder and multilingual
// decoder at one configuration. Encoders are pure functions of (input,
// parameters) and emit unit-norm rows; all batch methods record onto the
// active tape when parameters are trainable.
class Model {
 public:
  Model(const ModelConfig& config, std::uint64_t seed);
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  Model clone() const;

  const ModelConfig& config() const { return config_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  // [B, d] coordinates; the per-frame map is averaged over frames.
  Tensor encode_vision(std::span<const VisionItem> items) const;
  // EOS-position pooling; requires L0 input.
  Tensor encode_pivot(std::span<const TokenSequence> seqs) const;
  // Mean pooling over non-PAD positions; any language.
  Tensor encode_multi(std::span<const TokenSequence> seqs) const;

  LatentCoordinate encode_vision(const VisionItem& item) const;
  LatentCoordinate encode_pivot(const TokenSequence& seq) const;
  LatentCoordinate encode_multi(const TokenSequence& seq) const;

  // Teacher-forced decoder pass. inputs[b] starts with a BOS token; returns
  // logits [B * T, vocab] with T = longest input, rows beyond an input's
  // length are padding.
  Tensor decode(const Tensor& coords, std::span<const std::vector<std::int32_t>> inputs) const;

  // Next-token logits after prefix (which must start with BOS_lang).
  std::vector<float> decode_step(const LatentCoordinate& coord, std::span<const std::int32_t> prefix,
                                 Language lang) const;

 private:
  Tensor encode_text(const TextEncoderParams& enc, std::span<const TokenSequence> seqs, Pooling pooling) const;
  void build(std::uint64_t seed);

  ModelConfig config_;
  ParameterSet params_;
  VisionEncoderParams vision_;
  TextEncoderParams pivot_;
  TextEncoderParams multi_;
  DecoderParams decoder_;
};

}  // namespace latentbridge
