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

#include "latentbridge/corpus/vocab.hpp"

#include <fstream>
#include <sstream>

namespace latentbridge {

namespace {
const std::array<std::string, 7> kReserved{"<pad>", "</s>", "<mask>", "<bos_L0>", "<bos_L1>", "<bos_L2>", "<bos_L3>"};
}

Vocab::Vocab(const std::array<std::vector<std::string>, kNumLanguages>& surface) {
  tokens_.assign(kReserved.begin(), kReserved.end());
  language_.assign(kReserved.size(), -1);
  for (Language lang : kAllLanguages) {
    for (const auto& word : surface[index_of(lang)]) {
      tokens_.push_back(word);
      language_.push_back(static_cast<std::int8_t>(lang));
    }
  }
  index();
}

void Vocab::index() {
  lookup_.clear();
  for (auto& ids : surface_ids_) ids.clear();
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!lookup_.emplace(tokens_[i], static_cast<std::int32_t>(i)).second) {
      throw CorpusError("duplicate token '" + tokens_[i] + "' in vocabulary");
    }
    if (language_[i] >= 0) surface_ids_[static_cast<std::size_t>(language_[i])].push_back(static_cast<std::int32_t>(i));
  }
}

const std::string& Vocab::token(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw CorpusError("token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(size()));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<std::int32_t> Vocab::find(std::string_view tok) const {
  auto it = lookup_.find(std::string(tok));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::int32_t Vocab::id(std::string_view tok) const {
  if (auto id = find(tok)) return *id;
  throw CorpusError("unknown token '" + std::string(tok) + "'");
}

std::optional<Language> Vocab::language_of(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= language_.size() || language_[static_cast<std::size_t>(id)] < 0) {
    return std::nullopt;
  }
  return static_cast<Language>(language_[static_cast<std::size_t>(id)]);
}

std::string Vocab::detokenize(const TokenSequence& seq) const {
  std::string out;
  for (auto id : seq.ids) {
    if (!is_surface(id)) continue;
    if (!out.empty()) out += ' ';
    out += token(id);
  }
  return out;
}

TokenSequence Vocab::tokenize(std::string_view line, Language lang) const {
  TokenSequence seq{lang, {}};
  std::istringstream in{std::string(line)};
  std::string word;
  while (in >> word) seq.ids.push_back(id(word));
  seq.ids.push_back(token::kEos);
  return seq;
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read " + path.string());
  std::array<std::vector<std::string>, kNumLanguages> surface;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (line_no < kReserved.size()) {
      if (line != kReserved[line_no]) {
        throw CorpusError(path.string() + ":" + std::to_string(line_no + 1) + ": expected reserved token " +
                          kReserved[line_no]);
      }
    } else {
      surface[0].push_back(line);
    }
    ++line_no;
  }
  if (line_no < kReserved.size()) throw CorpusError(path.string() + ": truncated vocabulary");
  // The languages are ciphers of each other, so their surface blocks have
  // equal size and appear in language order.
  std::vector<std::string> words = std::move(surface[0]);
  if (words.empty() || words.size() % kNumLanguages != 0) {
    throw CorpusError(path.string() + ": surface token count " + std::to_string(words.size()) +
                      " is not divisible into four equal language blocks");
  }
  const std::size_t block = words.size() / kNumLanguages;
  for (std::size_t l = 0; l < kNumLanguages; ++l) {
    surface[l].assign(words.begin() + static_cast<std::ptrdiff_t>(l * block),
                      words.begin() + static_cast<std::ptrdiff_t>((l + 1) * block));
  }
  return Vocab(surface);
}

}  // namespace latentbridge
