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

#include "latentbridge/corpus/types.hpp"

namespace latentbridge {

std::string_view language_tag(Language lang) {
  static constexpr std::array<std::string_view, kNumLanguages> kTags{"L0", "L1", "L2", "L3"};
  return kTags[index_of(lang)];
}

std::optional<Language> parse_language(std::string_view tag) {
  for (Language l : kAllLanguages) {
    if (language_tag(l) == tag) return l;
  }
  return std::nullopt;
}

Language require_language(std::string_view tag) {
  if (auto l = parse_language(tag)) return *l;
  throw CorpusError("unknown language tag '" + std::string(tag) + "' (valid tags: L0, L1, L2, L3)");
}

std::string Domain::tag() const { return vision ? "vision" : std::string(language_tag(lang)); }

Domain parse_domain(std::string_view tag) {
  if (tag == "vision") return Domain::Vision();
  if (auto l = parse_language(tag)) return Domain::Text(*l);
  throw CorpusError("unknown domain '" + std::string(tag) + "' (valid: vision, L0, L1, L2, L3)");
}

std::vector<std::int32_t> TokenSequence::with_bos() const {
  std::vector<std::int32_t> out;
  out.reserve(ids.size() + 1);
  out.push_back(token::bos(lang));
  out.insert(out.end(), ids.begin(), ids.end());
  return out;
}

void validate_sequence(const TokenSequence& seq, std::size_t max_len) {
  if (seq.ids.empty() || seq.ids.back() != token::kEos) {
    throw CorpusError("token sequence must end with EOS");
  }
  if (seq.ids.size() > max_len) {
    throw CorpusError("token sequence of length " + std::to_string(seq.ids.size()) + " exceeds max_len " +
                      std::to_string(max_len));
  }
  for (std::size_t i = 0; i + 1 < seq.ids.size(); ++i) {
    const auto id = seq.ids[i];
    if (id == token::kPad || id == token::kEos || token::is_bos(id) || id < 0) {
      throw CorpusError("token sequence has reserved id " + std::to_string(id) + " at position " +
                        std::to_string(i));
    }
  }
}

}  // namespace latentbridge
