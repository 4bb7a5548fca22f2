// Copyright 2026 The wclner Authors.
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
// wclner: command-line driver for the contrastive NER pipeline.
//
//   stats      corpus statistics
//   train-wcl  contrastive fine-tuning of the encoder on sentence pairs
//   train-ner  BiLSTM-CRF training (optionally on a fine-tuned encoder)
//   predict    tag a CoNLL file
//   correct    knowledge-graph correction of predicted tags
//   eval       exact-match span scoring
//
// Exit status: 0 ok, 1 configuration error, 2 data error.

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wclner/corpus.hpp"
#include "wclner/encoder.hpp"
#include "wclner/error.hpp"
#include "wclner/eval.hpp"
#include "wclner/kg.hpp"
#include "wclner/numcore/param_store.hpp"
#include "wclner/tagger.hpp"
#include "wclner/wcl.hpp"

#ifndef WCLNER_VERSION
#define WCLNER_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace wclner {
namespace {

// Effective settings, echoed into the manifest.
using Echo = std::map<std::string, std::string>;

struct Common {
  std::string config;
  std::string out;
  std::string tags;
  std::uint64_t seed = 1;
};

struct StatsOpts {
  std::vector<std::string> files;
  std::string train, dev, test;
};

struct WclOpts {
  std::string pairs;
  std::string train;
  double tau = 0.07;
  std::size_t queue = 4096;
  int epochs = 10;
  double lr = 0.05;
  std::string key_update = "momentum";
  std::string similarity = "cosine";
  Index embedding_dim = 64;
  Index hidden_dim = 64;
};

struct NerOpts {
  std::string train;
  std::string dev;
  std::string encoder;
  int epochs = 10;
  double lr = 0.05;
  Index tagger_hidden = 64;
  Index embedding_dim = 64;
  Index hidden_dim = 64;
  bool strict = false;
  bool freeze_encoder = false;
};

struct PredictOpts {
  std::string model;
  std::string input;
  std::string format = "conll";
};

struct CorrectOpts {
  std::string input;
  std::string kg;
  std::string typemap;
  std::string endpoint;
  std::string cache;
  std::string type_policy = "drop";
  std::string log;
  std::size_t max_window = 6;
  bool strict = false;
};

struct EvalOpts {
  std::string gold;
  std::string pred;
};

TagSet LoadTags(const std::string& path) {
  return path.empty() ? TagSet::Conll2003() : TagSet::Load(path);
}

std::vector<TaggedSentence> ReadConll(const std::string& path, const TagSet& tags,
                                      bool strict) {
  ConllOptions opts;
  opts.strict = strict;
  opts.tag_set = tags;
  return ParseConll(fs::path(path), opts);
}

// One token per line, blank line between sentences; tags default to O.
std::vector<TaggedSentence> ReadTokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file", path);
  std::vector<TaggedSentence> out;
  TaggedSentence cur;
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = SplitWhitespace(line);
    if (fields.empty()) {
      if (!cur.tokens.empty()) out.push_back(std::move(cur));
      cur = {};
      continue;
    }
    cur.tokens.push_back(fields[0]);
    cur.tags.push_back("O");
  }
  if (!cur.tokens.empty()) out.push_back(std::move(cur));
  return out;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing", path);
  out << text;
}

std::string Str(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- stats

void RunStats(const Common& c, const StatsOpts& o, Echo& echo) {
  std::vector<std::pair<std::string, std::string>> inputs;
  if (!o.train.empty()) inputs.emplace_back("train", o.train);
  if (!o.dev.empty()) inputs.emplace_back("dev", o.dev);
  if (!o.test.empty()) inputs.emplace_back("test", o.test);
  for (const auto& f : o.files) inputs.emplace_back(f, f);
  if (inputs.empty()) throw ConfigError("stats needs at least one input file");
  const TagSet tags = LoadTags(c.tags);
  std::string report;
  for (const auto& [name, path] : inputs) {
    const auto corpus = ReadConll(path, tags, !c.tags.empty());
    report += "# " + name + "\n" + FormatStats(ComputeStats(corpus)) + "\n";
    echo["input." + name] = path;
  }
  std::cout << report;
  if (!c.out.empty()) WriteText(c.out, report);
}

// ------------------------------------------------------------ train-wcl

void RunTrainWcl(const Common& c, const WclOpts& o, Echo& echo) {
  if (c.out.empty()) throw ConfigError("train-wcl needs --out");
  WclConfig cfg;
  cfg.tau = o.tau;
  cfg.queue_size = o.queue;
  cfg.epochs = o.epochs;
  cfg.lr = o.lr;
  cfg.seed = c.seed;
  cfg.key_update = KeyUpdate::Parse(o.key_update);
  cfg.similarity = ParseSimilarityMode(o.similarity);
  cfg.Validate();
  const TagSet tags = LoadTags(c.tags);

  const auto pairs = LoadPairs(fs::path(o.pairs));
  if (pairs.empty()) throw DataError("no sentence pairs", o.pairs);
  std::vector<std::vector<std::string>> extra;
  if (!o.train.empty()) {
    for (auto& s : ReadConll(o.train, tags, false)) extra.push_back(std::move(s.tokens));
  }
  WclModel model = WclModel::Create(
      pairs, extra, static_cast<Index>(tags.num_types()),
      EncoderConfig{o.embedding_dim, o.hidden_dim}, cfg);
  const WclReport report = train_wcl(pairs, model, cfg);
  const Separation sep = MeasureSeparation(pairs, model, cfg.similarity);

  std::string log;
  for (std::size_t e = 0; e < report.epoch_mean_loss.size(); ++e) {
    log += "epoch=" + std::to_string(e + 1) +
           " loss=" + Str(report.epoch_mean_loss[e]) + "\n";
  }
  log += "positive_similarity=" + Str(sep.positive) + "\n";
  log += "negative_similarity=" + Str(sep.negative) + "\n";
  log += "separation=" + Str(sep.positive - sep.negative) + "\n";
  std::cout << log;
  SaveCheckpoint(model.query, c.out);
  WriteText(c.out + ".log", log);

  echo["pairs"] = o.pairs;
  echo["tau"] = Str(cfg.tau);
  echo["queue"] = std::to_string(cfg.queue_size);
  echo["epochs"] = std::to_string(cfg.epochs);
  echo["lr"] = Str(cfg.lr);
  echo["key-update"] = cfg.key_update.ToString();
  echo["similarity"] = o.similarity;
  echo["embedding-dim"] = std::to_string(o.embedding_dim);
  echo["hidden-dim"] = std::to_string(o.hidden_dim);
  echo["entity-types"] = std::to_string(tags.num_types());
  echo["vocab"] = std::to_string(model.vocab.size());
}

// ------------------------------------------------------------ train-ner

void RunTrainNer(const Common& c, const NerOpts& o, Echo& echo) {
  if (c.out.empty()) throw ConfigError("train-ner needs --out");
  NerConfig cfg;
  cfg.epochs = o.epochs;
  cfg.lr = o.lr;
  cfg.seed = c.seed;
  cfg.train_encoder = !o.freeze_encoder;
  cfg.Validate();
  TaggerConfig tcfg;
  tcfg.hidden_dim = o.tagger_hidden;
  tcfg.strict = o.strict;
  const TagSet tags = LoadTags(c.tags);

  const auto train = ReadConll(o.train, tags, true);
  std::mt19937_64 rng(c.seed);
  ParamStore encoder;
  Vocab vocab;
  if (!o.encoder.empty()) {
    encoder = LoadCheckpoint(o.encoder);
    if (!encoder.meta().contains(kVocabMetaKey)) {
      throw DataError("checkpoint has no vocabulary", o.encoder);
    }
    std::istringstream in(encoder.meta().at(kVocabMetaKey));
    vocab = Vocab::Parse(in, o.encoder);
  } else {
    std::vector<std::vector<std::string>> sentences;
    for (const auto& s : train) sentences.push_back(s.tokens);
    vocab = Vocab::Build(sentences);
    EncoderParams::Create(encoder, vocab.size(),
                          EncoderConfig{o.embedding_dim, o.hidden_dim}, rng);
  }
  NerModel model = NerModel::Create(encoder, vocab, tags, tcfg, rng);
  const std::size_t added =
      o.encoder.empty() ? 0 : model.ExtendVocabulary(train, rng);

  const NerReport report = train_ner(train, model, cfg);
  std::string log;
  for (std::size_t e = 0; e < report.epoch_mean_loss.size(); ++e) {
    log += "epoch=" + std::to_string(e + 1) +
           " loss=" + Str(report.epoch_mean_loss[e]) + "\n";
  }
  if (!o.dev.empty()) {
    const auto dev = ReadConll(o.dev, tags, true);
    const Prf r = prf(count_matches(dev, predict(dev, model)).overall);
    log += "dev_precision=" + Str(r.precision) + "\ndev_recall=" + Str(r.recall) +
           "\ndev_f1=" + Str(r.f1) + "\n";
    echo["dev"] = o.dev;
  }
  std::cout << log;
  model.Save(c.out);
  WriteText(c.out + ".log", log);

  echo["train"] = o.train;
  echo["encoder"] = o.encoder.empty() ? "(fresh)" : o.encoder;
  echo["epochs"] = std::to_string(cfg.epochs);
  echo["lr"] = Str(cfg.lr);
  echo["tagger-hidden"] = std::to_string(tcfg.hidden_dim);
  echo["strict"] = o.strict ? "true" : "false";
  echo["freeze-encoder"] = o.freeze_encoder ? "true" : "false";
  echo["vocab"] = std::to_string(model.vocab().size());
  echo["vocab_added"] = std::to_string(added);
}

// -------------------------------------------------------------- predict

void RunPredict(const Common& c, const PredictOpts& o, Echo& echo) {
  if (c.out.empty()) throw ConfigError("predict needs --out");
  if (o.format != "conll" && o.format != "tokens") {
    throw ConfigError("unknown --format '" + o.format + "' (conll, tokens)");
  }
  const NerModel model = NerModel::Load(o.model);
  const auto input = o.format == "tokens" ? ReadTokens(o.input)
                                          : ReadConll(o.input, model.tags(), false);
  WriteConll(predict(input, model), fs::path(c.out));
  echo["model"] = o.model;
  echo["input"] = o.input;
  echo["format"] = o.format;
  echo["sentences"] = std::to_string(input.size());
}

// -------------------------------------------------------------- correct

void RunCorrect(const Common& c, const CorrectOpts& o, Echo& echo) {
  if (c.out.empty()) throw ConfigError("correct needs --out");
  const TagSet tags = LoadTags(c.tags);
  const auto predicted = ReadConll(o.input, tags, false);
  echo["input"] = o.input;

  if (o.kg.empty() && o.endpoint.empty()) {
    // No graph: pass the predictions through untouched.
    WriteConll(predicted, fs::path(c.out));
    echo["kg"] = "(none)";
    echo["corrections"] = "0";
    return;
  }

  TypeMap types = o.typemap.empty() ? TypeMap::Conll2003Default()
                                    : TypeMap::Load(o.typemap);
  types.set_policy(ParseTypePolicy(o.type_policy));
  std::optional<KgIndex> index;
  if (!o.kg.empty()) {
    index = KgIndex::Load(o.kg, types, o.strict);
    const auto& st = index->stats();
    if (st.dropped_types || st.skipped_lines) {
      std::cerr << "warning: " << st.dropped_types
                << " unmapped type record(s), " << st.skipped_lines
                << " malformed line(s) skipped in " << o.kg << "\n";
    }
    echo["kg"] = o.kg;
    echo["kg.records"] = std::to_string(st.records);
  }
  std::unique_ptr<RemoteLookup> remote;
  if (!o.endpoint.empty()) {
    remote = std::make_unique<RemoteLookup>(o.endpoint, o.cache, types);
    echo["kg-endpoint"] = o.endpoint;
    echo["kg-cache"] = o.cache;
  }
  const KgLookup lookup = [&](const std::string& surface) {
    std::vector<std::string> out;
    if (index) {
      if (const auto* hit = index->Lookup(surface)) out = *hit;
    }
    if (remote) {
      for (const auto& t : remote->Lookup(surface)) {
        if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
      }
    }
    return out;
  };

  std::vector<std::vector<std::string>> sentences;
  for (const auto& s : predicted) sentences.push_back(s.tokens);
  PeOptions pe_opts;
  pe_opts.max_window = o.max_window;
  pe_opts.tags = &tags;
  pe_opts.policy = types.policy();
  const PotentialEntitySet pe = build_pe(sentences, lookup, pe_opts);

  std::vector<Correction> corrections;
  WriteConll(modify_entities(predicted, pe, &corrections), fs::path(c.out));
  if (!o.log.empty()) {
    std::string text;
    for (const Correction& k : corrections) {
      text += std::to_string(k.sentence + 1) + "\t" + std::to_string(k.span.start) +
              "\t" + std::to_string(k.span.end) + "\t" + k.span.type + "\t" +
              k.surface + "\n";
    }
    WriteText(o.log, text);
  }
  std::cout << "potential_entities=" << pe.size() << "\n"
            << "corrections=" << corrections.size() << "\n";
  if (remote && remote->warnings()) {
    std::cerr << "warning: " << remote->warnings()
              << " knowledge-graph lookup(s) failed and were treated as misses\n";
    echo["kg.warnings"] = std::to_string(remote->warnings());
  }
  echo["type-policy"] = o.type_policy;
  echo["max-window"] = std::to_string(o.max_window);
  echo["potential_entities"] = std::to_string(pe.size());
  echo["corrections"] = std::to_string(corrections.size());
}

// ----------------------------------------------------------------- eval

void RunEval(const Common& c, const EvalOpts& o, Echo& echo) {
  const TagSet tags = LoadTags(c.tags);
  const auto gold = ReadConll(o.gold, tags, false);
  const auto pred = ReadConll(o.pred, tags, false);
  const std::string report = FormatReport(count_matches(gold, pred));
  std::cout << report;
  if (!c.out.empty()) WriteText(c.out, report);
  echo["gold"] = o.gold;
  echo["pred"] = o.pred;
}

// ------------------------------------------------------------- plumbing

// Rewrites argv so that key=value lines of --config come first; CLI11 keeps
// the last value, so command-line flags win.
std::vector<std::string> ExpandConfig(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::vector<std::string> injected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto f = SplitWhitespace(s);
      std::string out;
      for (std::size_t i = 0; i < f.size(); ++i) out += (i ? " " : "") + f[i];
      return out;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": bad key");
    }
    injected.push_back("--" + key + "=" + value);
  }
  // Subcommand name stays first.
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

void WriteManifest(const std::string& out, const std::string& subcommand,
                   const Common& c, const Echo& echo, double seconds) {
  std::string text;
  text += "tool=wclner\n";
  text += "version=" WCLNER_VERSION "\n";
  text += "subcommand=" + subcommand + "\n";
  text += "seed=" + std::to_string(c.seed) + "\n";
  if (!c.config.empty()) text += "config=" + c.config + "\n";
  text += "tags=" + (c.tags.empty() ? std::string("(conll2003)") : c.tags) + "\n";
  text += "output=" + out + "\n";
  for (const auto& [k, v] : echo) text += "option." + k + "=" + v + "\n";
  text += "eigen=" + std::to_string(EIGEN_WORLD_VERSION) + "." +
          std::to_string(EIGEN_MAJOR_VERSION) + "." +
          std::to_string(EIGEN_MINOR_VERSION) + "\n";
  text += "cli11=" CLI11_VERSION "\n";
  text += "compiler=" __VERSION__ "\n";
  text += "elapsed_seconds=" + Str(seconds) + "\n";
  WriteText(out + ".manifest", text);
}

// Last line of a CLI11 message, which is the informative one.
std::string OneLine(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

int Main(int argc, char** argv) {
  CLI::App app{"Contrastive NER pipeline: train, predict, correct, evaluate."};
  app.require_subcommand(1);
  app.set_version_flag("--version", WCLNER_VERSION);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  StatsOpts stats;
  WclOpts wcl;
  NerOpts ner;
  PredictOpts pred;
  CorrectOpts corr;
  EvalOpts ev;

  auto add_common = [&](CLI::App* sub, bool seed) {
    sub->add_option("--config", common.config, "key=value file; flags win");
    sub->add_option("--out", common.out, "Output path");
    sub->add_option("--tags", common.tags, "Entity types, one per line")
        ->check(CLI::ExistingFile);
    if (seed) sub->add_option("--seed", common.seed, "Random seed");
  };

  auto* s_stats = app.add_subcommand("stats", "Corpus statistics");
  add_common(s_stats, false);
  s_stats->add_option("files", stats.files, "CoNLL files")->check(CLI::ExistingFile);
  s_stats->add_option("--train", stats.train)->check(CLI::ExistingFile);
  s_stats->add_option("--dev", stats.dev)->check(CLI::ExistingFile);
  s_stats->add_option("--test", stats.test)->check(CLI::ExistingFile);

  auto* s_wcl = app.add_subcommand("train-wcl", "Contrastive encoder fine-tuning");
  add_common(s_wcl, true);
  s_wcl->add_option("--pairs", wcl.pairs, "Tab-separated sentence pairs")
      ->required()
      ->check(CLI::ExistingFile);
  s_wcl->add_option("--train", wcl.train, "CoNLL file whose tokens join the vocabulary")
      ->check(CLI::ExistingFile);
  s_wcl->add_option("--tau", wcl.tau, "Temperature");
  s_wcl->add_option("--queue", wcl.queue, "Negative queue length");
  s_wcl->add_option("--epochs", wcl.epochs);
  s_wcl->add_option("--lr", wcl.lr);
  s_wcl->add_option("--key-update", wcl.key_update,
                    "frozen | mirror | momentum | momentum:<m>");
  s_wcl->add_option("--similarity", wcl.similarity, "cosine | dot");
  s_wcl->add_option("--embedding-dim", wcl.embedding_dim);
  s_wcl->add_option("--hidden-dim", wcl.hidden_dim);

  auto* s_ner = app.add_subcommand("train-ner", "BiLSTM-CRF training");
  add_common(s_ner, true);
  s_ner->add_option("--train", ner.train)->required()->check(CLI::ExistingFile);
  s_ner->add_option("--dev", ner.dev)->check(CLI::ExistingFile);
  s_ner->add_option("--encoder", ner.encoder, "Checkpoint from train-wcl")
      ->check(CLI::ExistingFile);
  s_ner->add_option("--epochs", ner.epochs);
  s_ner->add_option("--lr", ner.lr);
  s_ner->add_option("--tagger-hidden", ner.tagger_hidden, "BiLSTM hidden size");
  s_ner->add_option("--embedding-dim", ner.embedding_dim, "Fresh encoder only");
  s_ner->add_option("--hidden-dim", ner.hidden_dim, "Fresh encoder only");
  s_ner->add_flag("--strict", ner.strict, "Forbid invalid BIO transitions");
  s_ner->add_flag("--freeze-encoder", ner.freeze_encoder);

  auto* s_pred = app.add_subcommand("predict", "Tag sentences");
  add_common(s_pred, false);
  s_pred->add_option("--model", pred.model)->required()->check(CLI::ExistingFile);
  s_pred->add_option("--input,--test", pred.input)->required()->check(CLI::ExistingFile);
  s_pred->add_option("--format", pred.format, "conll | tokens");

  auto* s_corr = app.add_subcommand("correct", "Knowledge-graph correction");
  add_common(s_corr, false);
  s_corr->add_option("--input,--pred", corr.input)->required()->check(CLI::ExistingFile);
  s_corr->add_option("--kg", corr.kg, "Snapshot TSV: surface<TAB>type")
      ->check(CLI::ExistingFile);
  s_corr->add_option("--typemap", corr.typemap, "kg-type<TAB>dataset-type")
      ->check(CLI::ExistingFile);
  s_corr->add_option("--kg-endpoint", corr.endpoint, "Lookup URL prefix");
  s_corr->add_option("--kg-cache", corr.cache, "Lookup cache TSV");
  s_corr->add_option("--type-policy", corr.type_policy, "drop | error");
  s_corr->add_option("--max-window", corr.max_window);
  s_corr->add_option("--log", corr.log, "Corrections TSV");
  s_corr->add_flag("--strict", corr.strict, "Malformed snapshot lines are errors");

  auto* s_eval = app.add_subcommand("eval", "Exact-match evaluation");
  add_common(s_eval, false);
  s_eval->add_option("--gold", ev.gold)->required()->check(CLI::ExistingFile);
  s_eval->add_option("--pred", ev.pred)->required()->check(CLI::ExistingFile);

  std::vector<std::string> args = ExpandConfig(argc, argv);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(OneLine(e.what()));
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const auto start = std::chrono::steady_clock::now();
  Echo echo;
  if (name == "stats") RunStats(common, stats, echo);
  if (name == "train-wcl") RunTrainWcl(common, wcl, echo);
  if (name == "train-ner") RunTrainNer(common, ner, echo);
  if (name == "predict") RunPredict(common, pred, echo);
  if (name == "correct") RunCorrect(common, corr, echo);
  if (name == "eval") RunEval(common, ev, echo);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!common.out.empty()) WriteManifest(common.out, name, common, echo, seconds);
  return 0;
}

}  // namespace
}  // namespace wclner

int main(int argc, char** argv) {
  try {
    return wclner::Main(argc, argv);
  } catch (const wclner::ConfigError& e) {
    std::cerr << "error: config: " << wclner::OneLine(e.what()) << "\n";
    return 1;
  } catch (const wclner::DataError& e) {
    std::cerr << "error: data: " << wclner::OneLine(e.what()) << "\n";
    return 2;
  } catch (const wclner::Error& e) {
    // Shape and numeric failures come from the inputs the run was given.
    std::cerr << "error: data: " << wclner::OneLine(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: data: " << wclner::OneLine(e.what()) << "\n";
    return 2;
  }
}
