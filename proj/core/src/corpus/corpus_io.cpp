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

#include "latentbridge/corpus/corpus_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace latentbridge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_float(float value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

void put_ids(std::ostream& out, const std::vector<std::int32_t>& ids) {
  out << '[';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ',';
    out << ids[i];
  }
  out << ']';
}

void put_frames(std::ostream& out, const VisionItem& item) {
  out << '[';
  for (std::size_t f = 0; f < item.frame_count; ++f) {
    if (f) out << ',';
    out << '[';
    for (std::size_t j = 0; j < item.frame_dim; ++j) {
      if (j) out << ',';
      out << format_float(item.values[f * item.frame_dim + j]);
    }
    out << ']';
  }
  out << ']';
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write " + path.string());
  return out;
}

std::string test_file(const Domain& d) { return "test_" + d.tag() + ".jsonl"; }

const char* split_name(std::size_t k) {
  static const char* kNames[] = {"D1", "D2", "D3", "D4"};
  return kNames[k];
}

}  // namespace

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  corpus.vocab.save(dir / "vocab.txt");

  {
    const auto& c = corpus.config;
    auto out = open_out(dir / "corpus.cfg");
    out << "seed=" << c.seed << "\nscenes=" << c.scenes << "\ntest=" << c.test << "\nframes=" << c.frames
        << "\nvision_dim=" << c.vision_dim << "\njitter=" << format_float(c.jitter) << "\nmax_len=" << c.max_len
        << "\nagents=" << c.inventory.agents << "\nactions=" << c.inventory.actions
        << "\nobjects=" << c.inventory.objects << "\nmodifiers=" << c.inventory.modifiers << '\n';
  }

  {
    std::vector<std::string> split(corpus.scenes.size(), "unused");
    for (std::size_t id : corpus.test.scene_ids) split[id] = "test";
    for (std::size_t k = 0; k < 4; ++k) {
      for (const auto& p : corpus.pairsets[k].pairs) split[p.scene_id] = split_name(k);
    }
    auto out = open_out(dir / "scenes.tsv");
    out << "scene_id\tagent\taction\tobject\tmodifier\tsplit\n";
    for (std::size_t i = 0; i < corpus.scenes.size(); ++i) {
      const auto& s = corpus.scenes[i];
      out << i << '\t' << s.agent << '\t' << s.action << '\t' << s.object << '\t' << s.modifier << '\t' << split[i]
          << '\n';
    }
  }

  for (const auto& set : corpus.pairsets) {
    auto out = open_out(dir / (set.name + ".jsonl"));
    for (const auto& p : set.pairs) {
      out << "{\"scene_id\":" << p.scene_id << ",\"a_domain\":\"" << set.a.tag() << "\",\"b_domain\":\""
          << set.b.tag() << "\",";
      if (set.a.vision) {
        out << "\"a_frames\":";
        put_frames(out, p.vision);
      } else {
        out << "\"a_tokens\":";
        put_ids(out, p.a_text.ids);
      }
      out << ",\"b_tokens\":";
      put_ids(out, p.b_text.ids);
      out << "}\n";
    }
  }

  {
    auto out = open_out(dir / test_file(Domain::Vision()));
    for (std::size_t i = 0; i < corpus.test.scene_ids.size(); ++i) {
      out << "{\"scene_id\":" << corpus.test.scene_ids[i] << ",\"domain\":\"vision\",\"frames\":";
      put_frames(out, corpus.test.vision[i]);
      out << "}\n";
    }
  }
  for (Language l : kAllLanguages) {
    auto out = open_out(dir / test_file(Domain::Text(l)));
    const auto& text = corpus.test.text[index_of(l)];
    for (std::size_t i = 0; i < corpus.test.scene_ids.size(); ++i) {
      out << "{\"scene_id\":" << corpus.test.scene_ids[i] << ",\"domain\":\"" << language_tag(l) << "\",\"tokens\":";
      put_ids(out, text[i].ids);
      out << "}\n";
    }
  }

  {
    auto out = open_out(dir / "downstream.jsonl");
    for (const auto& rec : corpus.downstream) {
      out << "{\"scene_id\":" << rec.scene_id << ",\"a_domain\":\"vision\",\"a_frames\":";
      put_frames(out, rec.vision);
      out << ",\"b_tokens\":{";
      for (Language l : kAllLanguages) {
        if (l != Language::kL0) out << ',';
        out << '"' << language_tag(l) << "\":";
        put_ids(out, rec.text[index_of(l)].ids);
      }
      out << "}}\n";
    }
  }
}

namespace {

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot read " + path.string());
  std::vector<json> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw CorpusError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

TokenSequence parse_tokens(const json& j, Language lang, std::size_t max_len) {
  TokenSequence seq{lang, j.get<std::vector<std::int32_t>>()};
  validate_sequence(seq, max_len);
  return seq;
}

VisionItem parse_frames(const json& j, std::size_t expected_dim) {
  VisionItem item;
  item.frame_count = j.size();
  item.frame_dim = expected_dim;
  if (item.frame_count == 0) throw CorpusError("vision item has no frames");
  for (const auto& frame : j) {
    if (frame.size() != expected_dim) {
      throw CorpusError("frame dimension " + std::to_string(frame.size()) + " != " + std::to_string(expected_dim));
    }
    for (const auto& v : frame) item.values.push_back(static_cast<float>(v.get<double>()));
  }
  return item;
}

std::map<std::string, std::string> read_key_values(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot read " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw CorpusError(path.string() + ": malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace

Corpus read_corpus(const fs::path& dir) {
  Corpus corpus;
  const auto kv = read_key_values(dir / "corpus.cfg");
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw CorpusError("corpus.cfg: missing key " + key);
    return it->second;
  };
  auto& c = corpus.config;
  c.seed = std::stoull(get("seed"));
  c.scenes = std::stoul(get("scenes"));
  c.test = std::stoul(get("test"));
  c.frames = std::stoul(get("frames"));
  c.vision_dim = std::stoul(get("vision_dim"));
  c.jitter = std::stof(get("jitter"));
  c.max_len = std::stoul(get("max_len"));
  c.inventory = {std::stoul(get("agents")), std::stoul(get("actions")), std::stoul(get("objects")),
                 std::stoul(get("modifiers"))};

  corpus.vocab = Vocab::load(dir / "vocab.txt");

  {
    std::ifstream in(dir / "scenes.tsv");
    if (!in) throw CorpusError("cannot read " + (dir / "scenes.tsv").string());
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream row(line);
      std::size_t id;
      Scene s;
      std::string split;
      row >> id >> s.agent >> s.action >> s.object >> s.modifier >> split;
      if (!row || id != corpus.scenes.size()) throw CorpusError("scenes.tsv: malformed row '" + line + "'");
      corpus.scenes.push_back(s);
    }
  }

  for (std::size_t k = 0; k < 4; ++k) {
    PairSet& set = corpus.pairsets[k];
    set.name = split_name(k);
    set.a = k == 0 ? Domain::Vision() : Domain::Text(Language::kL0);
    set.b = Domain::Text(static_cast<Language>(k == 0 ? 0 : k));
    for (const auto& rec : read_jsonl(dir / (set.name + ".jsonl"))) {
      set.a = parse_domain(rec.at("a_domain").get<std::string>());
      set.b = parse_domain(rec.at("b_domain").get<std::string>());
      PairRecord p;
      p.scene_id = rec.at("scene_id").get<std::size_t>();
      if (set.a.vision) {
        p.vision = parse_frames(rec.at("a_frames"), c.vision_dim);
      } else {
        p.a_text = parse_tokens(rec.at("a_tokens"), set.a.lang, c.max_len);
      }
      p.b_text = parse_tokens(rec.at("b_tokens"), set.b.lang, c.max_len);
      set.pairs.push_back(std::move(p));
    }
  }

  for (const auto& rec : read_jsonl(dir / test_file(Domain::Vision()))) {
    corpus.test.scene_ids.push_back(rec.at("scene_id").get<std::size_t>());
    corpus.test.vision.push_back(parse_frames(rec.at("frames"), c.vision_dim));
  }
  for (Language l : kAllLanguages) {
    auto records = read_jsonl(dir / test_file(Domain::Text(l)));
    if (records.size() != corpus.test.scene_ids.size()) {
      throw CorpusError(test_file(Domain::Text(l)) + ": record count differs from test_vision.jsonl");
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].at("scene_id").get<std::size_t>() != corpus.test.scene_ids[i]) {
        throw CorpusError(test_file(Domain::Text(l)) + ": scene order differs from test_vision.jsonl");
      }
      corpus.test.text[index_of(l)].push_back(parse_tokens(records[i].at("tokens"), l, c.max_len));
    }
  }

  for (const auto& rec : read_jsonl(dir / "downstream.jsonl")) {
    DownstreamRecord d;
    d.scene_id = rec.at("scene_id").get<std::size_t>();
    d.vision = parse_frames(rec.at("a_frames"), c.vision_dim);
    for (Language l : kAllLanguages) {
      d.text[index_of(l)] = parse_tokens(rec.at("b_tokens").at(std::string(language_tag(l))), l, c.max_len);
    }
    corpus.downstream.push_back(std::move(d));
  }
  return corpus;
}

std::vector<VisionItem> read_vision_items(const fs::path& path, std::size_t vision_dim) {
  std::vector<VisionItem> items;
  std::size_t line = 0;
  for (const auto& rec : read_jsonl(path)) {
    ++line;
    const char* key = rec.contains("frames") ? "frames" : "a_frames";
    if (!rec.contains(key)) throw CorpusError(path.string() + ":" + std::to_string(line) + ": no frames field");
    items.push_back(parse_frames(rec.at(key), vision_dim));
  }
  return items;
}

}  // namespace latentbridge
