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

#include "latentbridge/run/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "latentbridge/corpus/corpus_io.hpp"

namespace latentbridge {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key) + " (expected true or false)");
}

Language parse_lang(std::string_view key, std::string_view value) {
  if (auto lang = parse_language(value)) return *lang;
  throw ConfigError("bad language '" + std::string(value) + "' for " + std::string(key) +
                    " (expected L0, L1, L2 or L3)");
}

std::vector<Language> parse_languages(std::string_view key, std::string_view value) {
  std::vector<Language> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto end = comma == std::string_view::npos ? value.size() : comma;
    out.push_back(parse_lang(key, trim(value.substr(start, end - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

using Setter = std::function<void(std::string_view key, std::string_view value)>;

bool set_train_field(TrainConfig& t, std::string_view key, std::string_view v) {
  if (key == "lambda1") t.weights.lambda1 = parse_number<float>(key, v);
  else if (key == "lambda2") t.weights.lambda2 = parse_number<float>(key, v);
  else if (key == "tau") t.weights.tau = parse_number<float>(key, v);
  else if (key == "mask_percent") t.mask_percent = parse_number<float>(key, v);
  else if (key == "noise_std") t.noise_std = parse_number<float>(key, v);
  else if (key == "renormalize_noise") t.renormalize_noise = parse_bool(key, v);
  else if (key == "learning_rate") t.learning_rate = parse_number<float>(key, v);
  else if (key == "warmup_steps") t.warmup_steps = parse_number<std::size_t>(key, v);
  else if (key == "weight_decay") t.weight_decay = parse_number<float>(key, v);
  else if (key == "batch_align") t.batch_align = parse_number<std::size_t>(key, v);
  else if (key == "batch_dlr") t.batch_dlr = parse_number<std::size_t>(key, v);
  else if (key == "epochs") t.epochs = parse_number<std::size_t>(key, v);
  else if (key == "train_encoder_in_dlr") t.train_encoder_in_dlr = parse_bool(key, v);
  else if (key == "pivot_self_pairs") t.pivot_self_pairs = parse_bool(key, v);
  else if (key == "finetune_ratio") t.finetune_ratio = parse_number<double>(key, v);
  else if (key == "finetune_lang") t.finetune_lang = parse_lang(key, v);
  else if (key == "finetune_replay") t.finetune_replay = parse_bool(key, v);
  else if (key == "languages") t.languages = parse_languages(key, v);
  else return false;
  return true;
}

std::string languages_text(const std::vector<Language>& langs) {
  std::string out;
  for (std::size_t i = 0; i < langs.size(); ++i) {
    if (i) out += ',';
    out += language_tag(langs[i]);
  }
  return out;
}

void write_train(std::ostream& out, const TrainConfig& t) {
  out << "lambda1=" << format_float(t.weights.lambda1) << "\nlambda2=" << format_float(t.weights.lambda2) << "\ntau=" << format_float(t.weights.tau)
      << "\nmask_percent=" << format_float(t.mask_percent) << "\nnoise_std=" << format_float(t.noise_std)
      << "\nrenormalize_noise=" << (t.renormalize_noise ? "true" : "false") << "\nlearning_rate=" << format_float(t.learning_rate)
      << "\nwarmup_steps=" << t.warmup_steps << "\nweight_decay=" << format_float(t.weight_decay)
      << "\nbatch_align=" << t.batch_align << "\nbatch_dlr=" << t.batch_dlr << "\nepochs=" << t.epochs
      << "\ntrain_encoder_in_dlr=" << (t.train_encoder_in_dlr ? "true" : "false")
      << "\npivot_self_pairs=" << (t.pivot_self_pairs ? "true" : "false") << "\nfinetune_ratio=" << t.finetune_ratio
      << "\nfinetune_lang=" << language_tag(t.finetune_lang)
      << "\nfinetune_replay=" << (t.finetune_replay ? "true" : "false")
      << "\nlanguages=" << languages_text(t.languages) << '\n';
}

const std::vector<std::string>& stage_sections() {
  static const std::vector<std::string> names{"align-vision", "align-lingual", "dlr", "dlr-translate", "finetune"};
  return names;
}

TrainConfig& stage_section(RunConfig& c, std::string_view section) {
  if (section == "align-vision") return c.align_vision;
  if (section == "align-lingual") return c.align_lingual;
  if (section == "dlr") return c.dlr_caption;
  if (section == "dlr-translate") return c.dlr_translate;
  return c.finetune;
}

void assign(RunConfig& c, std::string_view section, std::string_view key, std::string_view v) {
  const std::string where = section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
  bool known = true;
  if (section.empty()) {
    if (key == "corpus_seed") c.corpus_seed = parse_number<std::uint64_t>(where, v);
    else if (key == "train_seed") c.train_seed = parse_number<std::uint64_t>(where, v);
    else known = false;
  } else if (section == "corpus") {
    if (key == "scenes") c.corpus.scenes = parse_number<std::size_t>(where, v);
    else if (key == "test") c.corpus.test = parse_number<std::size_t>(where, v);
    else if (key == "frames") c.corpus.frames = parse_number<std::size_t>(where, v);
    else if (key == "vision_dim") c.corpus.vision_dim = parse_number<std::size_t>(where, v);
    else if (key == "jitter") c.corpus.jitter = parse_number<float>(where, v);
    else if (key == "max_len") c.corpus.max_len = parse_number<std::size_t>(where, v);
    else known = false;
  } else if (section == "model") {
    if (key == "d") c.model.d = parse_number<std::size_t>(where, v);
    else if (key == "enc_layers") c.model.enc_layers = parse_number<std::size_t>(where, v);
    else if (key == "dec_layers") c.model.dec_layers = parse_number<std::size_t>(where, v);
    else if (key == "heads") c.model.heads = parse_number<std::size_t>(where, v);
    else if (key == "ffn_mult") c.model.ffn_mult = parse_number<std::size_t>(where, v);
    else known = false;
  } else if (section == "decode") {
    if (key == "beam_size") c.decode.beam_size = parse_number<std::size_t>(where, v);
    else if (key == "max_len") c.decode.max_len = parse_number<std::size_t>(where, v);
    else if (key == "alpha") c.decode.alpha = parse_number<float>(where, v);
    else known = false;
  } else if (section == "train") {
    for (const auto& name : stage_sections()) {
      known = set_train_field(stage_section(c, name), key, v);
    }
  } else if (std::find(stage_sections().begin(), stage_sections().end(), section) != stage_sections().end()) {
    known = set_train_field(stage_section(c, section), key, v);
  } else {
    throw ConfigError("unknown config section [" + std::string(section) + "]");
  }
  if (!known) throw ConfigError("unknown config key " + where);
}

struct Assignment {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;
};

Assignment split_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(text) + "' is not key=value");
  Assignment a;
  const std::string lhs = trim(text.substr(0, eq));
  a.value = trim(text.substr(eq + 1));
  const auto dot = lhs.find('.');
  if (dot == std::string::npos) {
    a.key = lhs;
  } else {
    a.section = lhs.substr(0, dot);
    a.key = lhs.substr(dot + 1);
  }
  return a;
}

// [train] first, then everything else in file order.
void apply_all(RunConfig& c, const std::vector<Assignment>& items) {
  for (const auto& a : items) {
    if (a.section == "train") assign(c, a.section, a.key, a.value);
  }
  for (const auto& a : items) {
    if (a.section != "train") assign(c, a.section, a.key, a.value);
  }
}

}  // namespace

std::string_view regime_name(Regime regime) { return regime == Regime::kCaption ? "caption" : "translate"; }

Regime parse_regime(std::string_view name) {
  if (name == "caption") return Regime::kCaption;
  if (name == "translate") return Regime::kTranslate;
  throw ConfigError("unknown regime '" + std::string(name) + "' (expected caption or translate)");
}

CorpusConfig RunConfig::corpus_config() const {
  CorpusConfig out = corpus;
  out.seed = corpus_seed;
  return out;
}

TrainConfig RunConfig::stage(Stage s, Regime regime) const {
  TrainConfig out;
  switch (s) {
    case Stage::kAlignVision: out = align_vision; break;
    case Stage::kAlignLingual: out = align_lingual; break;
    case Stage::kDlr: out = regime == Regime::kCaption ? dlr_caption : dlr_translate; break;
    case Stage::kFinetune: out = finetune; break;
  }
  out.stage = s;
  out.seed = train_seed;
  return out;
}

void RunConfig::validate() const {
  try {
    for (Stage s : {Stage::kAlignVision, Stage::kAlignLingual, Stage::kDlr, Stage::kFinetune}) stage(s).validate();
    dlr_translate.validate();
    decode.validate();
    ModelConfig m = model;
    m.max_len = corpus.max_len;
    m.vision_dim = corpus.vision_dim;
    m.vocab_size = 8;
    m.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (corpus.test >= corpus.scenes) throw ConfigError("invalid corpus config: test must be below scenes");
  if (corpus.frames == 0) throw ConfigError("invalid corpus config: frames must be positive");
  if (decode.max_len >= corpus.max_len) {
    throw ConfigError("invalid decode config: max_len must be below the corpus max_len");
  }
}

RunConfig default_run_config() {
  RunConfig c;
  c.align_vision = default_train_config(Stage::kAlignVision);
  c.align_vision.epochs = 7;
  c.align_lingual = default_train_config(Stage::kAlignLingual);
  c.dlr_caption = default_train_config(Stage::kDlr);
  c.dlr_caption.epochs = 100;
  c.dlr_translate = c.dlr_caption;
  c.dlr_translate.mask_percent = 5.0f;
  c.dlr_translate.noise_std = 0.01f;
  c.finetune = default_train_config(Stage::kFinetune);
  c.decode.max_len = c.corpus.max_len - 1;
  return c;
}

RunConfig parse_run_config(std::string_view text, std::span<const std::string> overrides) {
  RunConfig config = default_run_config();
  std::vector<Assignment> items;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    Assignment a{section, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
                 line_no};
    if (!seen.insert({a.section, a.key}).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key " + a.key);
    }
    items.push_back(std::move(a));
  }
  try {
    apply_all(config, items);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::vector<Assignment> extra;
  seen.clear();
  for (const auto& o : overrides) {
    extra.push_back(split_override(o));
    if (!seen.insert({extra.back().section, extra.back().key}).second) {
      throw ConfigError("conflicting overrides for " + o.substr(0, o.find('=')));
    }
  }
  apply_all(config, extra);
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_config(text.str(), overrides);
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const Assignment a = split_override(assignment);
  assign(config, a.section, a.key, a.value);
}

std::string to_text(const RunConfig& c) {
  std::ostringstream out;
  out << "corpus_seed=" << c.corpus_seed << "\ntrain_seed=" << c.train_seed << "\n\n[corpus]\nscenes=" << c.corpus.scenes
      << "\ntest=" << c.corpus.test << "\nframes=" << c.corpus.frames << "\nvision_dim=" << c.corpus.vision_dim
      << "\njitter=" << format_float(c.corpus.jitter) << "\nmax_len=" << c.corpus.max_len << "\n\n[model]\nd=" << c.model.d
      << "\nenc_layers=" << c.model.enc_layers << "\ndec_layers=" << c.model.dec_layers
      << "\nheads=" << c.model.heads << "\nffn_mult=" << c.model.ffn_mult << '\n';
  const std::pair<const char*, const TrainConfig*> stages[] = {{"align-vision", &c.align_vision},
                                                               {"align-lingual", &c.align_lingual},
                                                               {"dlr", &c.dlr_caption},
                                                               {"dlr-translate", &c.dlr_translate},
                                                               {"finetune", &c.finetune}};
  for (const auto& [name, t] : stages) {
    out << "\n[" << name << "]\n";
    write_train(out, *t);
  }
  out << "\n[decode]\nbeam_size=" << c.decode.beam_size << "\nmax_len=" << c.decode.max_len
      << "\nalpha=" << format_float(c.decode.alpha) << '\n';
  return out.str();
}

}  // namespace latentbridge
