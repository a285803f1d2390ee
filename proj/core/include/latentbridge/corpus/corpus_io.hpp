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

#include "latentbridge/corpus/corpus.hpp"

namespace latentbridge {

// Directory layout:
//   vocab.txt                 one token per line, line index = id
//   corpus.cfg                generation parameters (key=value)
//   scenes.tsv                scene_id, attributes, split
//   D1.jsonl .. D4.jsonl      {scene_id, a_domain, b_domain, a_tokens|a_frames, b_tokens}
//   test_vision.jsonl         {scene_id, domain, frames}
//   test_L0.jsonl .. L3       {scene_id, domain, tokens}
//   downstream.jsonl          {scene_id, a_domain, a_frames, b_tokens: {L0..L3}}
// Writing is byte-deterministic.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus read_corpus(const std::filesystem::path& dir);

// Vision items from line-delimited records carrying a "frames" or "a_frames"
// field, such as test_vision.jsonl.
std::vector<VisionItem> read_vision_items(const std::filesystem::path& path, std::size_t vision_dim);

// Formats a float with the shortest decimal text that round-trips.
std::string format_float(float value);

}  // namespace latentbridge
