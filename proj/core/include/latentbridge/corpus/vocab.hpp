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

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "latentbridge/corpus/types.hpp"

namespace latentbridge {

// Bijection between token strings and ids. Ids 0..6 are the reserved tokens;
// the four languages' surface words follow in language order and are
// pairwise disjoint.
class Vocab {
 public:
  Vocab() = default;
  // Reserved tokens plus the given surface words, one list per language.
  explicit Vocab(const std::array<std::vector<std::string>, kNumLanguages>& surface);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::int32_t id) const;
  std::optional<std::int32_t> find(std::string_view token) const;
  std::int32_t id(std::string_view token) const;  // throws CorpusError

  bool is_surface(std::int32_t id) const { return id >= token::kFirstSurface && id < static_cast<std::int32_t>(size()); }
  std::optional<Language> language_of(std::int32_t id) const;
  // Surface ids of one language, ascending.
  const std::vector<std::int32_t>& surface_ids(Language lang) const { return surface_ids_[index_of(lang)]; }

  // Surface words joined by single spaces; reserved tokens are dropped.
  std::string detokenize(const TokenSequence& seq) const;
  // Inverse of detokenize: whitespace-split words, EOS appended.
  TokenSequence tokenize(std::string_view line, Language lang) const;

  void save(const std::filesystem::path& path) const;
  static Vocab load(const std::filesystem::path& path);

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  void index();

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> lookup_;
  std::vector<std::int8_t> language_;  // -1 for reserved tokens
  std::array<std::vector<std::int32_t>, kNumLanguages> surface_ids_;
};

}  // namespace latentbridge
