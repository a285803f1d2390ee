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

#include "latentbridge/model/config.hpp"

#include <charconv>
#include <sstream>
#include <string_view>
#include <utility>

namespace latentbridge {
namespace {

template <typename F>
void for_each_field(ModelConfig& c, F&& f) {
  f("d", c.d);
  f("enc_layers", c.enc_layers);
  f("dec_layers", c.dec_layers);
  f("heads", c.heads);
  f("ffn_mult", c.ffn_mult);
  f("max_len", c.max_len);
  f("vocab_size", c.vocab_size);
  f("vision_dim", c.vision_dim);
}

}  // namespace

void ModelConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ModelError(std::string("invalid model config: ") + what);
  };
  need(d > 0, "d must be positive");
  need(heads > 0 && d % heads == 0, "d must be divisible by heads");
  need(enc_layers > 0, "enc_layers must be positive");
  need(dec_layers > 0, "dec_layers must be positive");
  need(ffn_mult > 0, "ffn_mult must be positive");
  need(max_len >= 2, "max_len must be at least 2");
  need(vocab_size > 7, "vocab_size must cover the reserved ids and at least one word");
  need(vision_dim > 0, "vision_dim must be positive");
}

std::string ModelConfig::to_text() const {
  std::ostringstream out;
  ModelConfig copy = *this;
  for_each_field(copy, [&](const char* key, std::size_t& value) { out << key << '=' << value << '\n'; });
  return out.str();
}

ModelConfig ModelConfig::from_text(const std::string& text) {
  ModelConfig config;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ModelError("malformed model config line: " + line);
    const std::string_view key(line.data(), eq);
    const std::string_view value(line.data() + eq + 1, line.size() - eq - 1);
    bool known = false;
    for_each_field(config, [&](const char* name, std::size_t& field) {
      if (key != name) return;
      known = true;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), field);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ModelError("bad value for model config key " + std::string(key));
      }
    });
    if (!known) throw ModelError("unknown model config key: " + std::string(key));
  }
  config.validate();
  return config;
}

}  // namespace latentbridge
