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

// latentbridge: corpus generation, staged training, generation, evaluation,
// alignment diagnostics and ablations from one binary.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "latentbridge/corpus/corpus.hpp"
#include "latentbridge/corpus/corpus_io.hpp"
#include "latentbridge/evaluation/diagnostics.hpp"
#include "latentbridge/evaluation/metrics.hpp"
#include "latentbridge/inference/beam_search.hpp"
#include "latentbridge/run/pipeline.hpp"
#include "latentbridge/run/run_config.hpp"
#include "latentbridge/training/checkpoint.hpp"
#include "latentbridge/training/trainer.hpp"

namespace fs = std::filesystem;
using namespace latentbridge;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigFlags {
  std::string path;
  std::vector<std::string> sets;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", path, "Run config file (key=value lines with [sections])");
    cmd->add_option("--set", sets, "Override one config value, e.g. dlr.epochs=50")->take_all();
  }

  RunConfig load() const { return path.empty() ? parse_run_config("", sets) : load_run_config(path, sets); }
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// Writes to the file when a path is given, standard output otherwise.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out) throw UsageError("failed writing " + path);
}

Language language_flag(const std::string& value) { return require_language(value); }

// ---------------------------------------------------------------- gen-corpus

struct GenCorpus {
  std::string out;
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> scenes;
  std::optional<std::size_t> test;
  ConfigFlags config;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("gen-corpus", "Generate the synthetic corpus");
    cmd->add_option("--out", out, "Output directory")->required();
    cmd->add_flag("--force", force, "Overwrite an existing non-empty directory");
    cmd->add_option("--seed", seed, "Corpus seed");
    cmd->add_option("--scenes", scenes, "Number of scenes");
    cmd->add_option("--test", test, "Held-out test scenes");
    config.add_to(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    RunConfig rc = config.load();
    if (seed) rc.corpus_seed = *seed;
    if (scenes) rc.corpus.scenes = *scenes;
    if (test) rc.corpus.test = *test;
    rc.validate();
    if (fs::exists(out) && !fs::is_empty(out) && !force) {
      throw UsageError(out + " exists and is not empty (pass --force to overwrite)");
    }
    const Corpus corpus = generate_corpus(rc.corpus_config());
    fs::create_directories(out);
    write_corpus(corpus, out);
    std::cout << "wrote " << out << ": ";
    for (const auto& set : corpus.pairsets) std::cout << set.name << '=' << set.pairs.size() << ' ';
    std::cout << "test=" << corpus.test.scene_ids.size() << " downstream=" << corpus.downstream.size()
              << " vocab=" << corpus.vocab.size() << '\n';
  }
};

// --------------------------------------------------------------------- train

struct Train {
  std::string stage_text;
  std::string corpus_dir;
  std::string init;
  std::string out;
  std::optional<std::string> regime_text;
  std::optional<double> ratio;
  std::optional<std::uint64_t> seed;
  ConfigFlags config;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Run one training stage");
    cmd->add_option("--stage", stage_text, "align-vision | align-lingual | dlr | finetune")->required();
    cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    cmd->add_option("--out", out, "Checkpoint to write")->required();
    cmd->add_option("--init", init, "Checkpoint of the preceding stage");
    cmd->add_option("--regime", regime_text, "Reconstruction regime for dlr: caption | translate");
    cmd->add_option("--ratio", ratio, "Fraction of downstream pairs for finetune");
    cmd->add_option("--seed", seed, "Training seed");
    config.add_to(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    const Stage stage = parse_stage(stage_text);
    if (regime_text && stage != Stage::kDlr) throw UsageError("--regime only applies to --stage dlr");
    if (ratio && stage != Stage::kFinetune) throw UsageError("--ratio only applies to --stage finetune");
    const Regime regime = regime_text ? parse_regime(*regime_text) : Regime::kCaption;

    RunConfig rc = config.load();
    if (seed) rc.train_seed = *seed;
    if (ratio) apply_override(rc, "finetune.finetune_ratio=" + std::to_string(*ratio));
    rc.validate();

    const auto required = required_stage(stage);
    if (required && init.empty()) {
      throw UsageError("stage " + std::string(stage_name(stage)) + " requires --init with a checkpoint from stage " +
                       std::string(stage_name(*required)));
    }
    const Corpus corpus = read_corpus(corpus_dir);
    std::vector<std::string> history;
    std::optional<Model> model;
    if (!init.empty()) {
      const Checkpoint ckpt = load_checkpoint(init);
      if (required && !ckpt.has_stage(stage_name(*required))) {
        throw UsageError(init + " has no " + std::string(stage_name(*required)) + " stage; " +
                         std::string(stage_name(stage)) + " requires it");
      }
      history = ckpt.history;
      model = ckpt.to_model();
      const ModelConfig& m = model->config();
      if (m.vocab_size != corpus.vocab.size() || m.vision_dim != corpus.config.vision_dim ||
          m.max_len != corpus.config.max_len) {
        throw UsageError(init + " does not match the corpus vocabulary or dimensions");
      }
    } else {
      model.emplace(model_config_for(rc, corpus), rc.train_seed);
    }

    const TrainConfig cfg = rc.stage(stage, regime);
    const TrainResult result = run_stage(*model, corpus, cfg, [](const EpochLog& e) {
      std::cout << "epoch=" << e.epoch << " stage=" << stage_name(e.stage)
                << " loss=" << format_float(static_cast<float>(e.loss)) << std::endl;
    });
    std::ostringstream record;
    record << "stage=" << stage_name(stage);
    if (stage == Stage::kDlr) record << " regime=" << regime_name(regime);
    record << " epochs=" << cfg.epochs << " steps=" << result.steps << " train_seed=" << rc.train_seed
           << " corpus_seed=" << corpus.config.seed;
    if (stage == Stage::kFinetune) record << " ratio=" << cfg.finetune_ratio << " pairs=" << result.examples;
    history.push_back(record.str());
    save_checkpoint(Checkpoint::from_model(*model, history), out);
  }
};

// ------------------------------------------------------------------ generate

struct Generate {
  std::string task;
  std::optional<std::string> lang, src, tgt;
  std::string ckpt;
  std::string corpus_dir;
  std::string input;
  std::string out;
  std::optional<std::size_t> beam;
  bool greedy = false;
  ConfigFlags config;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("generate", "Caption vision items or translate sentences");
    cmd->add_option("--task", task, "caption | translate")->required();
    cmd->add_option("--lang", lang, "Caption language");
    cmd->add_option("--src", src, "Source language of translate input");
    cmd->add_option("--tgt", tgt, "Target language of translate output");
    cmd->add_option("--ckpt", ckpt, "Trained checkpoint")->required();
    cmd->add_option("--corpus", corpus_dir, "Corpus directory supplying vocab.txt")->required();
    cmd->add_option("--input", input, "Vision records (caption) or one sentence per line (translate)")->required();
    cmd->add_option("--out", out, "Output text file (default: standard output)");
    cmd->add_option("--beam", beam, "Beam size");
    cmd->add_flag("--greedy", greedy, "Greedy decoding");
    config.add_to(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    if (task != "caption" && task != "translate") {
      throw UsageError("unknown task '" + task + "' (expected caption or translate)");
    }
    const bool is_caption = task == "caption";
    if (is_caption && (src || tgt)) throw UsageError("caption takes --lang, not --src/--tgt");
    if (!is_caption && lang) throw UsageError("translate takes --src and --tgt, not --lang");
    if (is_caption && !lang) throw UsageError("caption requires --lang");
    if (!is_caption && !(src && tgt)) throw UsageError("translate requires --src and --tgt");
    if (greedy && beam) throw UsageError("--greedy and --beam are mutually exclusive");

    RunConfig rc = config.load();
    if (beam) rc.decode.beam_size = *beam;
    rc.decode.validate();
    const Model model = load_checkpoint(ckpt).to_model();
    const Vocab vocab = Vocab::load(fs::path(corpus_dir) / "vocab.txt");
    if (vocab.size() != model.config().vocab_size) throw UsageError("vocabulary size differs from the checkpoint's");

    std::string text;
    auto decode = [&](const LatentCoordinate& c, Language target) {
      const DecodeResult r =
          greedy ? greedy_decode(model, c, target, rc.decode.max_len) : beam_search(model, c, target, rc.decode);
      text += vocab.detokenize(r.sequence);
      text += '\n';
    };
    if (is_caption) {
      const Language target = language_flag(*lang);
      for (const auto& item : read_vision_items(input, model.config().vision_dim)) {
        decode(model.encode_vision(item), target);
      }
    } else {
      const Language source = language_flag(*src), target = language_flag(*tgt);
      std::size_t line_no = 0;
      for (const auto& line : read_lines(input)) {
        ++line_no;
        const TokenSequence seq = vocab.tokenize(line, source);
        for (auto id : seq.ids) {
          if (id != token::kEos && vocab.language_of(id) != source) {
            throw UsageError(input + ":" + std::to_string(line_no) + ": word '" + vocab.token(id) + "' is not " +
                             std::string(language_tag(source)));
          }
        }
        validate_sequence(seq, model.config().max_len);
        decode(source == Language::kL0 ? model.encode_pivot(seq) : model.encode_multi(seq), target);
      }
    }
    emit(out, text);
  }
};

// ------------------------------------------------------------------ evaluate

struct Evaluate {
  std::string hyp, ref;
  std::string metrics = "bleu4,rougeL";
  std::optional<std::string> lang;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("evaluate", "Score generated text against references");
    cmd->add_option("--hyp", hyp, "Hypotheses, one per line")->required();
    cmd->add_option("--ref", ref, "References, one per line")->required();
    cmd->add_option("--metrics", metrics, "Comma-separated subset of bleu4,rougeL");
    cmd->add_option("--lang", lang, "Language tag for the per-language breakdown");
    cmd->callback([this] { run(); });
  }

  void run() {
    bool want_bleu = false, want_rouge = false;
    std::stringstream list(metrics);
    std::string m;
    while (std::getline(list, m, ',')) {
      if (m == "bleu4") want_bleu = true;
      else if (m == "rougeL") want_rouge = true;
      else throw UsageError("unknown metric '" + m + "' (expected bleu4 or rougeL)");
    }
    const auto h = read_lines(hyp), r = read_lines(ref);
    if (h.size() != r.size()) {
      throw UsageError("line count mismatch: " + std::to_string(h.size()) + " hypotheses, " +
                       std::to_string(r.size()) + " references");
    }
    std::vector<Words> hw, rw;
    for (const auto& line : h) hw.push_back(split_words(line));
    for (const auto& line : r) rw.push_back(split_words(line));
    MetricReport report;
    report.samples = h.size();
    if (want_bleu) report.bleu4 = bleu4(hw, rw);
    if (want_rouge) report.rougeL = corpus_rouge_l(hw, rw);
    if (lang) report.per_language[std::string(language_tag(language_flag(*lang)))] = {report.bleu4, report.rougeL,
                                                                                       report.samples};
    auto j = nlohmann::ordered_json::parse(to_json_text(report));
    auto drop = [&](nlohmann::ordered_json& node) {
      if (!want_bleu) node.erase("bleu4");
      if (!want_rouge) node.erase("rougeL");
    };
    drop(j);
    for (auto& [k, v] : j["per_language"].items()) drop(v);
    std::cout << j.dump() << '\n';
  }
};

// ------------------------------------------------------------------ diagnose

struct Diagnose {
  std::string ckpt, corpus_dir;
  std::string pairs = "vision:L0,L1:L0,L2:L0,L3:L0,L1:L2,L1:L3,L2:L3,vision:L1";

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("diagnose", "Held-out retrieval and cosine diagnostics");
    cmd->add_option("--ckpt", ckpt, "Checkpoint")->required();
    cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    cmd->add_option("--pairs", pairs, "Comma-separated domain pairs a:b (vision, L0..L3)");
    cmd->callback([this] { run(); });
  }

  void run() {
    std::vector<std::pair<Domain, Domain>> wanted;
    std::stringstream list(pairs);
    std::string item;
    while (std::getline(list, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw UsageError("pair '" + item + "' is not a:b");
      wanted.emplace_back(parse_domain(item.substr(0, colon)), parse_domain(item.substr(colon + 1)));
    }
    const Model model = load_checkpoint(ckpt).to_model();
    const Corpus corpus = read_corpus(corpus_dir);
    std::vector<AlignmentReport> reports;
    for (const auto& [a, b] : wanted) {
      const auto ca = encode_test_domain(model, corpus, a);
      const auto cb = encode_test_domain(model, corpus, b);
      AlignmentReport r = retrieval_diagnostics(ca, cb);
      r.a_domain = a.tag();
      r.b_domain = b.tag();
      reports.push_back(r);
    }
    std::cout << to_json_text(std::span<const AlignmentReport>(reports)) << '\n';
  }
};

// -------------------------------------------------------------------- ablate

struct Ablate {
  std::vector<std::string> variants{"full"};
  std::string corpus_dir;
  std::string out;
  ConfigFlags config;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("ablate", "Run the pipeline per variant and tabulate zero-shot scores");
    cmd->add_option("--variant", variants, "full | no-corruption | no-cda | none | langs=L0,...")->take_all();
    cmd->add_option("--corpus", corpus_dir, "Corpus directory")->required();
    cmd->add_option("--out", out, "Tab-separated table (default: standard output)");
    config.add_to(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    std::vector<Variant> parsed;
    for (const auto& v : variants) parsed.push_back(parse_variant(v));
    const RunConfig rc = config.load();
    const Corpus corpus = read_corpus(corpus_dir);
    std::vector<VariantResult> results;
    for (const auto& v : parsed) {
      results.push_back(run_variant(corpus, rc, v, [](const std::string& line) { std::cerr << line << std::endl; }));
    }
    emit(out, ablation_table(results));
  }
};

// -------------------------------------------------------------------- config

struct Config {
  std::string out;
  ConfigFlags config;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("config", "Print the effective run configuration");
    cmd->add_option("--out", out, "Output file (default: standard output)");
    config.add_to(cmd);
    cmd->callback([this] { emit(out, to_text(config.load())); });
  }
};

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latentbridge: zero-shot captioning and translation through a shared latent space"};
  app.require_subcommand(1);
  GenCorpus gen_corpus;
  Train train;
  Generate generate;
  Evaluate evaluate;
  Diagnose diagnose;
  Ablate ablate;
  Config config;
  gen_corpus.add(app);
  train.add(app);
  generate.add(app);
  evaluate.add(app);
  diagnose.add(app);
  ablate.add(app);
  config.add(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
