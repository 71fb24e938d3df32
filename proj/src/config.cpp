// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/config.hpp"

#include <set>

#include <json.hpp>

#include "scs/binary_io.hpp"
#include "scs/error.hpp"

namespace scs {

using nlohmann::json;

std::optional<Activation> parse_activation(std::string_view name) {
  if (name == "identity") return Activation::Identity;
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  return std::nullopt;
}

namespace {

/// Walks one JSON object, rejecting keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ParameterError(name_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ParameterError(name_ + "." + key + ": wrong type");
    }
  }

  void path(const char* key, std::filesystem::path& out, const std::filesystem::path& base) {
    std::string s;
    get(key, s);
    if (s.empty()) return;
    std::filesystem::path p(s);
    out = p.is_absolute() ? p : base / p;
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& child(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ParameterError(name_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  Section top(root, "config");

  if (top.has("paths")) {
    Section s(top.child("paths"), "paths");
    s.path("corpus_dir", cfg.paths.corpus_dir, base);
    s.path("vocab", cfg.paths.vocab, base);
    s.path("checkpoint", cfg.paths.checkpoint, base);
    s.path("index", cfg.paths.index, base);
    s.path("report", cfg.paths.report, base);
    s.path("log", cfg.paths.log, base);
    s.finish();
  }
  if (top.has("model")) {
    Section s(top.child("model"), "model");
    s.get("dim", cfg.model.dim);
    s.get("layers", cfg.model.layers);
    std::string act(activation_name(cfg.model.activation));
    s.get("activation", act);
    auto a = parse_activation(act);
    if (!a) throw ParameterError("model.activation: expected identity, tanh or relu");
    cfg.model.activation = *a;
    s.finish();
    if (cfg.model.dim == 0) throw ParameterError("model.dim must be positive");
  }
  if (top.has("tokenizer")) {
    Section s(top.child("tokenizer"), "tokenizer");
    s.get("vocab_size", cfg.vocab_size);
    s.finish();
  }
  if (top.has("corpus")) {
    Section s(top.child("corpus"), "corpus");
    s.get("max_doc_tokens", cfg.corpus.max_doc_tokens);
    s.get("max_code_tokens", cfg.corpus.max_code_tokens);
    s.get("max_invalid_fraction", cfg.corpus.max_invalid_fraction);
    s.finish();
  }
  if (top.has("train")) {
    Section s(top.child("train"), "train");
    std::string loss(loss_name(cfg.train.loss));
    s.get("loss", loss);
    auto l = parse_loss(loss);
    if (!l) throw ParameterError("train.loss: expected margin or softmax");
    cfg.train.loss = *l;
    s.get("margin", cfg.train.margin);
    s.get("batch_size", cfg.train.batch_size);
    s.get("epochs", cfg.train.epochs);
    s.get("learning_rate", cfg.train.learning_rate);
    s.get("seed", cfg.train.seed);
    s.get("hard_mining", cfg.train.hard_mining);
    s.get("temperature", cfg.train.temperature);
    s.get("clip_norm", cfg.train.clip_norm);
    s.get("save_every", cfg.save_every);
    s.finish();
  }
  if (top.has("eval")) {
    Section s(top.child("eval"), "eval");
    s.get("candidates", cfg.eval.candidates);
    s.get("seed", cfg.eval.seed);
    s.get("model_name", cfg.eval.model_name);
    s.finish();
  }
  top.get("verbosity", cfg.verbosity);
  top.finish();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file_text(path);
  } catch (const IoError& e) {
    throw ParameterError(std::string("cannot read config: ") + e.what());
  }
  return parse_run_config(text, path.parent_path());
}

}  // namespace scs
