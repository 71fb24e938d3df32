// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "scs/binary_io.hpp"
#include "scs/bpe.hpp"
#include "scs/checkpoint.hpp"
#include "scs/config.hpp"
#include "scs/corpus.hpp"
#include "scs/error.hpp"
#include "scs/eval.hpp"
#include "scs/index.hpp"
#include "scs/lexer.hpp"
#include "scs/training.hpp"

namespace scs::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSubcommands = {"tokenize-train", "train", "index", "query", "eval"};

constexpr const char* kUsage =
    "usage: scs <subcommand> [options]\n"
    "\n"
    "subcommands:\n"
    "  tokenize-train   learn a BPE vocabulary from a corpus\n"
    "  train            train the encoder on docstring/function pairs\n"
    "  index            embed a code corpus into a search index\n"
    "  query            top-k code search (one-shot or one query per stdin line)\n"
    "  eval             NDCG/MRR of a checkpoint on a test split\n"
    "\n"
    "run `scs <subcommand> --help` for options\n";

/// Raised for anything the user must fix in flags or config (exit 3).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

void require_file(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " path is not set");
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) throw ConfigError(std::string(what) + " not found: " + p.string());
}

void require_writable_parent(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string(what) + " path is not set");
  const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(parent, ec)) {
    throw ConfigError(std::string(what) + " directory does not exist: " + parent.string());
  }
}

std::string format_score(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

/// Options shared by every subcommand; bound before parsing and merged into
/// the RunConfig afterwards so flags override the config file.
struct Common {
  std::string config;
  int verbosity = 1;
  CLI::Option* verbosity_opt = nullptr;
};

struct Flags {
  // Each entry: option handle + setter applied when the flag was given.
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;

  template <class T>
  void bind(CLI::App& app, const std::string& name, const std::string& help,
            std::function<void(RunConfig&, const T&)> apply) {
    auto value = std::make_shared<T>();
    auto* opt = app.add_option(name, *value, help);
    overrides.emplace_back(opt, [value, apply](RunConfig& cfg) { apply(cfg, *value); });
  }

  void flag(CLI::App& app, const std::string& name, const std::string& help,
            std::function<void(RunConfig&)> apply) {
    auto* opt = app.add_flag(name, help);
    overrides.emplace_back(opt, std::move(apply));
  }

  void apply(RunConfig& cfg) const {
    for (const auto& [opt, fn] : overrides)
      if (opt->count() > 0) fn(cfg);
  }
};

RunConfig resolve_config(const Common& common, const Flags& flags) {
  RunConfig cfg;
  if (!common.config.empty()) {
    try {
      cfg = load_run_config(common.config);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  if (common.verbosity_opt && common.verbosity_opt->count()) cfg.verbosity = common.verbosity;
  flags.apply(cfg);
  return cfg;
}

void add_common(CLI::App& app, Common& common) {
  app.add_option("--config", common.config, "JSON run config");
  common.verbosity_opt = app.add_option("--verbosity", common.verbosity, "0 = quiet, 1 = warnings");
}

void bind_paths(CLI::App& app, Flags& f) {
  f.bind<std::string>(app, "--corpus-dir", "directory with train/valid/test .jsonl",
                      [](RunConfig& c, const std::string& v) { c.paths.corpus_dir = v; });
  f.bind<std::string>(app, "--vocab", "BPE model file",
                      [](RunConfig& c, const std::string& v) { c.paths.vocab = v; });
}

void bind_model(CLI::App& app, Flags& f) {
  f.bind<std::size_t>(app, "--dim", "embedding dimension",
                      [](RunConfig& c, const std::size_t& v) { c.model.dim = v; });
  f.bind<std::size_t>(app, "--layers", "MLP layers",
                      [](RunConfig& c, const std::size_t& v) { c.model.layers = v; });
  f.bind<std::string>(app, "--activation", "identity | tanh | relu",
                      [](RunConfig& c, const std::string& v) {
                        auto a = parse_activation(v);
                        if (!a) throw ConfigError("--activation: expected identity, tanh or relu");
                        c.model.activation = *a;
                      });
}

void warn(const RunConfig& cfg, std::ostream& err, const std::string& msg) {
  if (cfg.verbosity >= 1) err << "warning: " << msg << '\n';
}

CorpusSplit load_checked(const fs::path& path, Partition part, const RunConfig& cfg,
                         std::ostream& err) {
  LoadReport report;
  auto split = load_split(path, part, cfg.corpus, &report);
  for (const auto& w : report.warnings) warn(cfg, err, w);
  if (!report.rejected.empty()) {
    warn(cfg, err, path.string() + ": " + std::to_string(report.rejected.size()) +
                       " invalid lines skipped (first at line " +
                       std::to_string(report.rejected.front().line_number) + ": " +
                       report.rejected.front().message + ")");
  }
  return split;
}

fs::path default_vocab(const RunConfig& cfg) {
  if (!cfg.paths.vocab.empty()) return cfg.paths.vocab;
  if (!cfg.paths.checkpoint.empty()) return cfg.paths.checkpoint.parent_path() / "vocab.txt";
  return "vocab.txt";
}

// ---------------------------------------------------------------------------

int cmd_tokenize_train(const RunConfig& cfg, const std::vector<std::string>& corpus_files,
                       const std::string& out_flag, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files(corpus_files.begin(), corpus_files.end());
  if (files.empty()) files.push_back(cfg.split_path(Partition::Train));
  for (const auto& f : files) require_file(f, "corpus");
  const fs::path out_path = !out_flag.empty() ? fs::path(out_flag) : default_vocab(cfg);
  require_writable_parent(out_path, "vocabulary output");

  std::map<std::string, std::size_t> counts;
  std::vector<CorpusSplit> splits;
  for (const auto& f : files) {
    auto split = load_checked(f, Partition::Train, cfg, err);
    for (const auto& e : split.entries) {
      for (auto& t : normalize_surface_tokens(e.doc_tokens)) ++counts[t];
      for (auto& t : normalize_surface_tokens(e.code_tokens)) ++counts[t];
    }
    splits.push_back(std::move(split));
  }
  const auto model = bpe_train(counts, cfg.vocab_size);
  model.save(out_path);
  out << "entries " << split_stats(splits).total() << " distinct_tokens " << counts.size()
      << " vocab_size " << model.vocab_size() << " merges " << model.merges().size() << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, const std::string& train_file, const std::string& init_ckpt,
              const std::string& save_init, std::ostream& out, std::ostream& err) {
  const fs::path train_path = !train_file.empty() ? fs::path(train_file)
                                                  : cfg.split_path(Partition::Train);
  require_file(train_path, "training corpus");
  require_file(cfg.paths.vocab, "vocabulary");
  require_writable_parent(cfg.paths.checkpoint, "checkpoint");
  if (!init_ckpt.empty()) require_file(init_ckpt, "initial checkpoint");
  if (!save_init.empty()) require_writable_parent(save_init, "initial checkpoint output");
  if (!cfg.paths.log.empty()) require_writable_parent(cfg.paths.log, "run log");
  try {
    cfg.train.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }

  const auto bpe = BpeModel::load(cfg.paths.vocab);
  EncoderConfig model_cfg = cfg.model;
  model_cfg.vocab_size = bpe.vocab_size();
  EncoderParams params = init_ckpt.empty() ? EncoderParams::initialize(model_cfg, cfg.train.seed)
                                           : load_checkpoint(init_ckpt, model_cfg);
  if (!save_init.empty()) save_checkpoint(params, save_init);

  const auto split = load_checked(train_path, Partition::Train, cfg, err);
  std::size_t skipped = 0;
  const auto pairs = prepare_pairs(split, bpe, cfg.corpus, &skipped);
  if (skipped) warn(cfg, err, std::to_string(skipped) + " pairs tokenized to nothing and were skipped");

  std::string log_text;
  auto on_epoch = [&](const EpochStats& s, const EncoderParams& p) {
    char line[128];
    std::snprintf(line, sizeof line, "epoch %zu loss %.6f lr %g\n", s.epoch, s.loss,
                  s.learning_rate);
    out << line << std::flush;
    log_text += line;
    if (!cfg.paths.log.empty()) atomic_write(cfg.paths.log, log_text);
    if (cfg.save_every > 0 && s.epoch % cfg.save_every == 0) save_checkpoint(p, cfg.paths.checkpoint);
  };
  auto result = train(cfg.train, pairs, std::move(params), on_epoch);
  save_checkpoint(result.params, cfg.paths.checkpoint);
  if (!cfg.paths.log.empty()) atomic_write(cfg.paths.log, log_text);
  return kExitOk;
}

int cmd_index(const RunConfig& cfg, const std::string& corpus_file, std::ostream& out,
              std::ostream& err) {
  const fs::path corpus_path = !corpus_file.empty() ? fs::path(corpus_file)
                                                    : cfg.split_path(Partition::Test);
  require_file(corpus_path, "corpus");
  require_file(cfg.paths.checkpoint, "checkpoint");
  const fs::path vocab = default_vocab(cfg);
  require_file(vocab, "vocabulary");
  require_writable_parent(cfg.paths.index, "index output");

  const auto bpe = BpeModel::load(vocab);
  const auto params = load_checkpoint(cfg.paths.checkpoint);
  if (params.config.vocab_size != bpe.vocab_size()) {
    throw ConfigError("checkpoint vocabulary size does not match " + vocab.string());
  }
  const auto split = load_checked(corpus_path, Partition::Test, cfg, err);
  BuildReport report;
  const auto index = build_index(split, params, bpe, cfg.corpus, &report);
  if (!report.skipped.empty()) {
    warn(cfg, err, std::to_string(report.skipped.size()) + " entries could not be encoded and were skipped");
  }
  save_index(index, cfg.paths.index);
  out << "indexed " << report.indexed << " skipped " << report.skipped.size() << " dim "
      << index.dim() << '\n';
  return kExitOk;
}

void print_results(const std::vector<RankedResult>& results, std::ostream& out) {
  for (const auto& r : results) out << r.rank << '\t' << format_score(r.score) << '\t' << r.id << '\n';
}

int cmd_query(const RunConfig& cfg, std::size_t k, const std::vector<std::string>& words,
              std::ostream& out, std::ostream& err, std::istream& in) {
  require_file(cfg.paths.index, "index");
  require_file(cfg.paths.checkpoint, "checkpoint");
  const fs::path vocab = default_vocab(cfg);
  require_file(vocab, "vocabulary");
  if (k == 0) throw ConfigError("--k must be at least 1");

  const auto bpe = BpeModel::load(vocab);
  const auto params = load_checkpoint(cfg.paths.checkpoint);
  const auto index = load_index(cfg.paths.index);
  const Searcher searcher(index, params, bpe, cfg.corpus.max_doc_tokens);

  if (!words.empty()) {
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    print_results(searcher.search(text, k), out);
    return kExitOk;
  }
  int status = kExitOk;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      print_results(searcher.search(line, k), out);
    } catch (const InputError& e) {
      err << "error: " << e.kind() << ": " << e.what() << '\n';
      status = kExitRuntime;
    }
    out << '\n' << std::flush;
  }
  return status;
}

int cmd_eval(const RunConfig& cfg, const std::string& test_file, std::ostream& out,
             std::ostream& err) {
  const fs::path test_path = !test_file.empty() ? fs::path(test_file)
                                                : cfg.split_path(Partition::Test);
  require_file(test_path, "test corpus");
  require_file(cfg.paths.checkpoint, "checkpoint");
  const fs::path vocab = default_vocab(cfg);
  require_file(vocab, "vocabulary");
  if (!cfg.paths.report.empty()) require_writable_parent(cfg.paths.report, "report");
  if (cfg.eval.candidates < 2) throw ConfigError("eval candidates must be at least 2");

  const auto bpe = BpeModel::load(vocab);
  const auto params = load_checkpoint(cfg.paths.checkpoint);
  const auto test = load_checked(test_path, Partition::Test, cfg, err);
  EmbeddingIndex index;
  std::error_code ec;
  if (!cfg.paths.index.empty() && fs::is_regular_file(cfg.paths.index, ec)) {
    index = load_index(cfg.paths.index);
  } else {
    index = build_index(test, params, bpe, cfg.corpus);
  }
  const auto report = evaluate(params, bpe, index, test, cfg.eval);
  out << report.to_table();
  if (!cfg.paths.report.empty()) atomic_write(cfg.paths.report, report.to_json());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::istream& in) {
  if (args.empty()) {
    err << kUsage;
    return kExitUsage;
  }
  const auto& first = args.front();
  if (first == "--help" || first == "-h") {
    out << kUsage;
    return kExitOk;
  }
  if (std::find(kSubcommands.begin(), kSubcommands.end(), first) == kSubcommands.end()) {
    err << "error: usage: unknown subcommand '" << first << "'\n" << kUsage;
    return kExitUsage;
  }

  CLI::App app{"semantic code search"};
  app.require_subcommand(1);
  Common common;
  Flags flags;

  // tokenize-train
  auto* tok = app.add_subcommand("tokenize-train", "learn a BPE vocabulary");
  std::vector<std::string> tok_corpus;
  std::string tok_out;
  add_common(*tok, common);
  tok->add_option("--corpus", tok_corpus, "JSONL corpus file(s); default <corpus-dir>/train.jsonl");
  tok->add_option("--out", tok_out, "output vocabulary file");
  flags.bind<std::size_t>(*tok, "--vocab-size", "target vocabulary size",
                          [](RunConfig& c, const std::size_t& v) { c.vocab_size = v; });
  flags.bind<std::string>(*tok, "--corpus-dir", "directory with train/valid/test .jsonl",
                          [](RunConfig& c, const std::string& v) { c.paths.corpus_dir = v; });

  // train
  auto* tr = app.add_subcommand("train", "train the encoder");
  std::string train_file, init_ckpt, save_init;
  add_common(*tr, common);
  bind_paths(*tr, flags);
  bind_model(*tr, flags);
  tr->add_option("--train-file", train_file, "training JSONL; default <corpus-dir>/train.jsonl");
  tr->add_option("--init-checkpoint", init_ckpt, "start from this checkpoint");
  tr->add_option("--save-init", save_init, "also write the initial parameters here");
  flags.bind<std::string>(*tr, "--checkpoint", "output checkpoint",
                          [](RunConfig& c, const std::string& v) { c.paths.checkpoint = v; });
  flags.bind<std::string>(*tr, "--log", "plain-text run log",
                          [](RunConfig& c, const std::string& v) { c.paths.log = v; });
  flags.bind<std::string>(*tr, "--loss", "margin | softmax", [](RunConfig& c, const std::string& v) {
    auto l = parse_loss(v);
    if (!l) throw ConfigError("--loss: expected margin or softmax");
    c.train.loss = *l;
  });
  flags.bind<double>(*tr, "--margin", "hinge margin",
                     [](RunConfig& c, const double& v) { c.train.margin = v; });
  flags.bind<double>(*tr, "--temperature", "softmax temperature",
                     [](RunConfig& c, const double& v) { c.train.temperature = v; });
  flags.bind<std::size_t>(*tr, "--batch-size", "pairs per batch",
                          [](RunConfig& c, const std::size_t& v) { c.train.batch_size = v; });
  flags.bind<std::size_t>(*tr, "--epochs", "training epochs",
                          [](RunConfig& c, const std::size_t& v) { c.train.epochs = v; });
  flags.bind<double>(*tr, "--lr", "learning rate",
                     [](RunConfig& c, const double& v) { c.train.learning_rate = v; });
  flags.bind<std::uint64_t>(*tr, "--seed", "random seed",
                            [](RunConfig& c, const std::uint64_t& v) { c.train.seed = v; });
  flags.bind<std::size_t>(*tr, "--save-every", "write the checkpoint every N epochs",
                          [](RunConfig& c, const std::size_t& v) { c.save_every = v; });
  flags.flag(*tr, "--hard-mining", "hardest in-batch negatives after epoch 1",
             [](RunConfig& c) { c.train.hard_mining = true; });

  // index
  auto* ix = app.add_subcommand("index", "build a search index");
  std::string index_corpus;
  add_common(*ix, common);
  bind_paths(*ix, flags);
  ix->add_option("--corpus", index_corpus, "JSONL corpus to index; default <corpus-dir>/test.jsonl");
  flags.bind<std::string>(*ix, "--checkpoint", "model checkpoint",
                          [](RunConfig& c, const std::string& v) { c.paths.checkpoint = v; });
  flags.bind<std::string>(*ix, "--out,--index", "output index file",
                          [](RunConfig& c, const std::string& v) { c.paths.index = v; });

  // query
  auto* q = app.add_subcommand("query", "search an index");
  std::size_t k = 10;
  std::vector<std::string> words;
  add_common(*q, common);
  bind_paths(*q, flags);
  q->add_option("--k", k, "number of results");
  q->add_option("text", words, "query text; omit to read one query per stdin line");
  flags.bind<std::string>(*q, "--checkpoint", "model checkpoint",
                          [](RunConfig& c, const std::string& v) { c.paths.checkpoint = v; });
  flags.bind<std::string>(*q, "--index", "index file",
                          [](RunConfig& c, const std::string& v) { c.paths.index = v; });

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string test_file;
  add_common(*ev, common);
  bind_paths(*ev, flags);
  ev->add_option("--test-file", test_file, "test JSONL; default <corpus-dir>/test.jsonl");
  flags.bind<std::string>(*ev, "--checkpoint", "model checkpoint",
                          [](RunConfig& c, const std::string& v) { c.paths.checkpoint = v; });
  flags.bind<std::string>(*ev, "--index", "index built from the same checkpoint (optional)",
                          [](RunConfig& c, const std::string& v) { c.paths.index = v; });
  flags.bind<std::string>(*ev, "--report", "structured report output (JSON)",
                          [](RunConfig& c, const std::string& v) { c.paths.report = v; });
  flags.bind<std::size_t>(*ev, "--candidates", "candidate set size per query",
                          [](RunConfig& c, const std::size_t& v) { c.eval.candidates = v; });
  flags.bind<std::uint64_t>(*ev, "--seed", "distractor sampling seed",
                            [](RunConfig& c, const std::uint64_t& v) { c.eval.seed = v; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    for (auto* sub : app.get_subcommands()) out << sub->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: config: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const RunConfig cfg = resolve_config(common, flags);
    if (tok->parsed()) return cmd_tokenize_train(cfg, tok_corpus, tok_out, out, err);
    if (tr->parsed()) return cmd_train(cfg, train_file, init_ckpt, save_init, out, err);
    if (ix->parsed()) return cmd_index(cfg, index_corpus, out, err);
    if (q->parsed()) return cmd_query(cfg, k, words, out, err, in);
    if (ev->parsed()) return cmd_eval(cfg, test_file, out, err);
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << kUsage;
  return kExitUsage;
}

}  // namespace scs::cli
