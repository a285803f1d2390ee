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

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace latentbridge {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// L0 is the pivot language; L1..L3 are derived from it.
enum class Language : std::uint8_t { kL0 = 0, kL1 = 1, kL2 = 2, kL3 = 3 };
inline constexpr std::size_t kNumLanguages = 4;
inline constexpr std::array<Language, kNumLanguages> kAllLanguages{Language::kL0, Language::kL1, Language::kL2,
                                                                   Language::kL3};

std::string_view language_tag(Language lang);
std::optional<Language> parse_language(std::string_view tag);
// Throws CorpusError listing the valid tags.
Language require_language(std::string_view tag);
inline std::size_t index_of(Language lang) { return static_cast<std::size_t>(lang); }

// A domain is either the vision modality or one of the languages.
struct Domain {
  bool vision = false;
  Language lang = Language::kL0;

  static Domain Vision() { return {true, Language::kL0}; }
  static Domain Text(Language l) { return {false, l}; }
  std::string tag() const;
  bool operator==(const Domain&) const = default;
};
Domain parse_domain(std::string_view tag);

// Reserved token ids. Surface tokens start at kFirstSurface.
namespace token {
inline constexpr std::int32_t kPad = 0;
inline constexpr std::int32_t kEos = 1;
inline constexpr std::int32_t kMask = 2;
inline constexpr std::int32_t bos(Language lang) { return 3 + static_cast<std::int32_t>(lang); }
inline constexpr std::int32_t kFirstSurface = 7;
inline constexpr bool is_bos(std::int32_t id) { return id >= 3 && id < kFirstSurface; }
}  // namespace token

struct Inventory {
  std::size_t agents = 12;
  std::size_t actions = 8;
  std::size_t objects = 12;
  std::size_t modifiers = 6;

  std::size_t combinations() const { return agents * actions * objects * modifiers; }
  std::size_t attribute_count() const { return agents + actions + objects + modifiers; }
};

struct Scene {
  std::uint32_t agent = 0;
  std::uint32_t action = 0;
  std::uint32_t object = 0;
  std::uint32_t modifier = 0;

  auto operator<=>(const Scene&) const = default;
};

// Token ids ending with EOS. The begin-of-sentence token is implied by lang
// and is not stored.
struct TokenSequence {
  Language lang = Language::kL0;
  std::vector<std::int32_t> ids;

  std::size_t length() const { return ids.size(); }
  std::vector<std::int32_t> with_bos() const;
  bool operator==(const TokenSequence&) const = default;
};

// Throws CorpusError unless seq ends with EOS, has no interior PAD/EOS and
// fits max_len.
void validate_sequence(const TokenSequence& seq, std::size_t max_len);

// F frames of a fixed dimension, stored row-major.
struct VisionItem {
  std::size_t frame_count = 0;
  std::size_t frame_dim = 0;
  std::vector<float> values;

  std::span<const float> frame(std::size_t i) const {
    return std::span<const float>(values).subspan(i * frame_dim, frame_dim);
  }
  bool operator==(const VisionItem&) const = default;
};

}  // namespace latentbridge
