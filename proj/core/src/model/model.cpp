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

#include "latentbridge/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latentbridge/numerics/ops.hpp"
#include "latentbridge/numerics/tape.hpp"

namespace latentbridge {
namespace {

using ops::add;
using ops::linear;

Tensor layer_norm(const Tensor& x, const LayerNormParams& p) { return ops::layer_norm(x, p.gain, p.bias); }

Tensor feed_forward(const Tensor& x, const FeedForwardParams& p) {
  return linear(ops::gelu(linear(x, p.w1, p.b1)), p.w2, p.b2);
}

Tensor attend(const Tensor& queries, const Tensor& memory, const AttentionParams& p,
              const ops::AttentionLayout& layout) {
  Tensor q = linear(queries, p.wq, p.bq);
  Tensor k = linear(memory, p.wk, p.bk);
  Tensor v = linear(memory, p.wv, p.bv);
  return linear(ops::attention(q, k, v, layout), p.wo, p.bo);
}

class Builder {
 public:
  Builder(ParameterSet& params, SubNetwork owner, std::string prefix, Rng& rng)
      : params_(params), owner_(owner), prefix_(std::move(prefix)), rng_(rng) {}

  Tensor weight(const std::string& name, Shape shape) {
    return params_.add(prefix_ + name, owner_, normal_init(std::move(shape), rng_));
  }
  Tensor bias(const std::string& name, std::size_t n) {
    return params_.add(prefix_ + name, owner_, Tensor::zeros({n}));
  }
  LayerNormParams layer_norm(const std::string& name, std::size_t n) {
    return {params_.add(prefix_ + name + ".g", owner_, Tensor::full({n}, 1.0f)), bias(name + ".b", n)};
  }
  AttentionParams attention(const std::string& name, std::size_t d) {
    AttentionParams a;
    a.wq = weight(name + ".wq", {d, d});
    a.bq = bias(name + ".bq", d);
    a.wk = weight(name + ".wk", {d, d});
    a.bk = bias(name + ".bk", d);
    a.wv = weight(name + ".wv", {d, d});
    a.bv = bias(name + ".bv", d);
    a.wo = weight(name + ".wo", {d, d});
    a.bo = bias(name + ".bo", d);
    return a;
  }
  FeedForwardParams feed_forward(const std::string& name, std::size_t in, std::size_t hidden, std::size_t out) {
    return {weight(name + ".w1", {in, hidden}), bias(name + ".b1", hidden), weight(name + ".w2", {hidden, out}),
            bias(name + ".b2", out)};
  }

 private:
  ParameterSet& params_;
  SubNetwork owner_;
  std::string prefix_;
  Rng& rng_;
};

TextEncoderParams build_text_encoder(ParameterSet& params, SubNetwork owner, const std::string& prefix,
                                     const ModelConfig& c, Rng& rng) {
  Builder b(params, owner, prefix, rng);
  TextEncoderParams enc;
  enc.tok_emb = b.weight("tok_emb", {c.vocab_size, c.d});
  enc.pos_emb = b.weight("pos_emb", {c.max_len + 1, c.d});
  for (std::size_t i = 0; i < c.enc_layers; ++i) {
    const std::string l = "layer" + std::to_string(i);
    EncoderLayerParams layer;
    layer.ln_attn = b.layer_norm(l + ".ln1", c.d);
    layer.attn = b.attention(l + ".attn", c.d);
    layer.ln_ffn = b.layer_norm(l + ".ln2", c.d);
    layer.ffn = b.feed_forward(l + ".ffn", c.d, c.ffn_mult * c.d, c.d);
    enc.layers.push_back(std::move(layer));
  }
  enc.ln_final = b.layer_norm("ln_f", c.d);
  enc.proj_w = b.weight("proj.w", {c.d, c.d});
  enc.proj_b = b.bias("proj.b", c.d);
  return enc;
}

// Embedding lookup for a padded [B, T] token grid.
Tensor embed(const Tensor& tok_emb, const Tensor& pos_emb, const std::vector<std::int32_t>& grid, std::size_t batch,
             std::size_t len) {
  std::vector<std::int32_t> positions(batch * len);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < len; ++t) positions[b * len + t] = static_cast<std::int32_t>(t);
  }
  return add(ops::gather_rows(tok_emb, grid), ops::gather_rows(pos_emb, positions));
}

}  // namespace

float LatentCoordinate::norm() const {
  double s = 0.0;
  for (float v : values) s += double(v) * v;
  return static_cast<float>(std::sqrt(s));
}

float LatentCoordinate::cosine(const LatentCoordinate& other) const {
  if (other.values.size() != values.size()) throw ModelError("coordinate dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) dot += double(values[i]) * other.values[i];
  const double denom = double(norm()) * other.norm();
  return denom > 0.0 ? static_cast<float>(dot / denom) : 0.0f;
}

LatentCoordinate row_coordinate(const Tensor& batch, std::size_t row) {
  const std::size_t d = batch.dim(1);
  auto data = batch.data().subspan(row * d, d);
  return LatentCoordinate{std::vector<float>(data.begin(), data.end())};
}

Tensor stack_coordinates(std::span<const LatentCoordinate> coords) {
  if (coords.empty()) throw ModelError("no coordinates to stack");
  const std::size_t d = coords.front().values.size();
  std::vector<float> values;
  values.reserve(coords.size() * d);
  for (const auto& c : coords) {
    if (c.values.size() != d) throw ModelError("coordinate dimension mismatch");
    values.insert(values.end(), c.values.begin(), c.values.end());
  }
  return Tensor::from_data({coords.size(), d}, std::move(values));
}

Model::Model(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  build(seed);
}

void Model::build(std::uint64_t seed) {
  const auto& c = config_;
  Rng rng(seed);
  {
    Builder b(params_, SubNetwork::kVision, "vision.", rng);
    const std::size_t hidden = c.ffn_mult * c.d;
    vision_.fc1_w = b.weight("fc1.w", {c.vision_dim, hidden});
    vision_.fc1_b = b.bias("fc1.b", hidden);
    vision_.fc2_w = b.weight("fc2.w", {hidden, c.d});
    vision_.fc2_b = b.bias("fc2.b", c.d);
  }
  pivot_ = build_text_encoder(params_, SubNetwork::kPivot, "pivot.", c, rng);
  multi_ = build_text_encoder(params_, SubNetwork::kMulti, "multi.", c, rng);

  Builder b(params_, SubNetwork::kDecoder, "decoder.", rng);
  decoder_.tok_emb = b.weight("tok_emb", {c.vocab_size, c.d});
  decoder_.pos_emb = b.weight("pos_emb", {c.max_len + 1, c.d});
  for (std::size_t i = 0; i < c.dec_layers; ++i) {
    const std::string l = "layer" + std::to_string(i);
    DecoderLayerParams layer;
    layer.ln_self = b.layer_norm(l + ".ln1", c.d);
    layer.self_attn = b.attention(l + ".self", c.d);
    layer.ln_cross = b.layer_norm(l + ".ln2", c.d);
    layer.cross_attn = b.attention(l + ".cross", c.d);
    layer.ln_ffn = b.layer_norm(l + ".ln3", c.d);
    layer.ffn = b.feed_forward(l + ".ffn", c.d, c.ffn_mult * c.d, c.d);
    decoder_.layers.push_back(std::move(layer));
  }
  decoder_.ln_final = b.layer_norm("ln_f", c.d);
  decoder_.out_bias = b.bias("out_bias", c.vocab_size);
}

Model Model::clone() const {
  Model copy(config_, 0);
  const auto& src = params_.entries();
  const auto& dst = copy.params_.entries();
  for (std::size_t i = 0; i < src.size(); ++i) {
    Tensor target = dst[i].value;
    std::copy(src[i].value.data().begin(), src[i].value.data().end(), target.data().begin());
  }
  for (SubNetwork net : kAllSubNetworks) copy.params_.set_frozen(net, params_.frozen(net));
  return copy;
}

Tensor Model::encode_vision(std::span<const VisionItem> items) const {
  if (items.empty()) throw ModelError("encode_vision: empty batch");
  std::size_t rows = 0;
  for (const auto& item : items) {
    if (item.frame_dim != config_.vision_dim) {
      throw ModelError("encode_vision: frame dimension " + std::to_string(item.frame_dim) + " does not match " +
                       std::to_string(config_.vision_dim));
    }
    if (item.frame_count == 0 || item.values.size() != item.frame_count * item.frame_dim) {
      throw ModelError("encode_vision: malformed vision item");
    }
    rows += item.frame_count;
  }
  std::vector<float> frames;
  frames.reserve(rows * config_.vision_dim);
  std::vector<float> pool(items.size() * rows, 0.0f);
  std::size_t offset = 0;
  for (std::size_t b = 0; b < items.size(); ++b) {
    frames.insert(frames.end(), items[b].values.begin(), items[b].values.end());
    const float w = 1.0f / static_cast<float>(items[b].frame_count);
    for (std::size_t f = 0; f < items[b].frame_count; ++f) pool[b * rows + offset + f] = w;
    offset += items[b].frame_count;
  }
  Tensor x = Tensor::from_data({rows, config_.vision_dim}, std::move(frames));
  Tensor h = linear(ops::gelu(linear(x, vision_.fc1_w, vision_.fc1_b)), vision_.fc2_w, vision_.fc2_b);
  Tensor pooled = ops::matmul(Tensor::from_data({items.size(), rows}, std::move(pool)), h);
  return ops::l2_normalize_rows(pooled);
}

Tensor Model::encode_pivot(std::span<const TokenSequence> seqs) const {
  for (const auto& s : seqs) {
    if (s.lang != Language::kL0) {
      throw ModelError("encode_pivot: expected L0 input, got " + std::string(language_tag(s.lang)));
    }
  }
  return encode_text(pivot_, seqs, Pooling::kEndToken);
}

Tensor Model::encode_multi(std::span<const TokenSequence> seqs) const {
  return encode_text(multi_, seqs, Pooling::kMean);
}

Tensor Model::encode_text(const TextEncoderParams& enc, std::span<const TokenSequence> seqs, Pooling pooling) const {
  if (seqs.empty()) throw ModelError("encode: empty batch");
  std::size_t len = 0;
  for (const auto& s : seqs) {
    validate_sequence(s, config_.max_len);
    for (auto id : s.ids) {
      if (static_cast<std::size_t>(id) >= config_.vocab_size) {
        throw ModelError("token id " + std::to_string(id) + " outside vocabulary");
      }
    }
    len = std::max(len, s.length());
  }
  const std::size_t batch = seqs.size();
  std::vector<std::int32_t> grid(batch * len, token::kPad);
  ops::AttentionLayout layout{batch, len, len, config_.heads, false, {}};
  for (std::size_t b = 0; b < batch; ++b) {
    std::copy(seqs[b].ids.begin(), seqs[b].ids.end(), grid.begin() + b * len);
    layout.key_lengths.push_back(seqs[b].length());
  }

  Tensor x = embed(enc.tok_emb, enc.pos_emb, grid, batch, len);
  for (const auto& layer : enc.layers) {
    Tensor h = layer_norm(x, layer.ln_attn);
    x = add(x, attend(h, h, layer.attn, layout));
    x = add(x, feed_forward(layer_norm(x, layer.ln_ffn), layer.ffn));
  }
  x = layer_norm(x, enc.ln_final);

  Tensor pooled;
  if (pooling == Pooling::kEndToken) {
    std::vector<std::int32_t> rows(batch);
    for (std::size_t b = 0; b < batch; ++b) rows[b] = static_cast<std::int32_t>(b * len + seqs[b].length() - 1);
    pooled = ops::gather_rows(x, rows);
  } else {
    std::vector<float> pool(batch * batch * len, 0.0f);
    for (std::size_t b = 0; b < batch; ++b) {
      const float w = 1.0f / static_cast<float>(seqs[b].length());
      for (std::size_t t = 0; t < seqs[b].length(); ++t) pool[b * batch * len + b * len + t] = w;
    }
    pooled = ops::matmul(Tensor::from_data({batch, batch * len}, std::move(pool)), x);
  }
  return ops::l2_normalize_rows(linear(pooled, enc.proj_w, enc.proj_b));
}

LatentCoordinate Model::encode_vision(const VisionItem& item) const {
  return row_coordinate(encode_vision(std::span<const VisionItem>(&item, 1)), 0);
}

LatentCoordinate Model::encode_pivot(const TokenSequence& seq) const {
  return row_coordinate(encode_pivot(std::span<const TokenSequence>(&seq, 1)), 0);
}

LatentCoordinate Model::encode_multi(const TokenSequence& seq) const {
  return row_coordinate(encode_multi(std::span<const TokenSequence>(&seq, 1)), 0);
}

Tensor Model::decode(const Tensor& coords, std::span<const std::vector<std::int32_t>> inputs) const {
  const std::size_t batch = inputs.size();
  if (batch == 0) throw ModelError("decode: empty batch");
  if (coords.rank() != 2 || coords.dim(0) != batch || coords.dim(1) != config_.d) {
    throw ModelError("decode: coordinates of shape " + shape_to_string(coords.shape()) + " for batch " +
                     std::to_string(batch));
  }
  std::size_t len = 0;
  for (const auto& in : inputs) {
    if (in.empty() || !token::is_bos(in.front())) throw ModelError("decode: input must start with a BOS token");
    if (in.size() > config_.max_len + 1) throw ModelError("decode: input longer than max_len");
    for (auto id : in) {
      if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
        throw ModelError("token id " + std::to_string(id) + " outside vocabulary");
      }
    }
    len = std::max(len, in.size());
  }
  std::vector<std::int32_t> grid(batch * len, token::kPad);
  ops::AttentionLayout self{batch, len, len, config_.heads, true, {}};
  for (std::size_t b = 0; b < batch; ++b) {
    std::copy(inputs[b].begin(), inputs[b].end(), grid.begin() + b * len);
    self.key_lengths.push_back(inputs[b].size());
  }
  const ops::AttentionLayout cross{batch, len, 1, config_.heads, false, std::vector<std::size_t>(batch, 1)};

  Tensor x = embed(decoder_.tok_emb, decoder_.pos_emb, grid, batch, len);
  for (const auto& layer : decoder_.layers) {
    Tensor h = layer_norm(x, layer.ln_self);
    x = add(x, attend(h, h, layer.self_attn, self));
    x = add(x, attend(layer_norm(x, layer.ln_cross), coords, layer.cross_attn, cross));
    x = add(x, feed_forward(layer_norm(x, layer.ln_ffn), layer.ffn));
  }
  x = layer_norm(x, decoder_.ln_final);
  return linear(x, ops::transpose(decoder_.tok_emb), decoder_.out_bias);
}

std::vector<float> Model::decode_step(const LatentCoordinate& coord, std::span<const std::int32_t> prefix,
                                      Language lang) const {
  if (prefix.empty() || prefix.front() != token::bos(lang)) {
    throw ModelError("decode_step: prefix must start with the BOS token of " + std::string(language_tag(lang)));
  }
  if (coord.values.size() != config_.d) throw ModelError("decode_step: coordinate dimension mismatch");
  NoGradScope no_grad;
  const std::vector<std::vector<std::int32_t>> inputs{std::vector<std::int32_t>(prefix.begin(), prefix.end())};
  Tensor logits = decode(stack_coordinates(std::span<const LatentCoordinate>(&coord, 1)), inputs);
  auto last = logits.data().subspan((prefix.size() - 1) * config_.vocab_size, config_.vocab_size);
  return {last.begin(), last.end()};
}

}  // namespace latentbridge
