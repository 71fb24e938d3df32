// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "scs/corpus.hpp"
#include "scs/encoder.hpp"
#include "scs/eval.hpp"
#include "scs/training.hpp"

namespace scs {

struct RunPaths {
  std::filesystem::path corpus_dir;  // holds train.jsonl / valid.jsonl / test.jsonl
  std::filesystem::path vocab;
  std::filesystem::path checkpoint;
  std::filesystem::path index;
  std::filesystem::path report;  // structured eval report
  std::filesystem::path log;     // training run log
};

/// Everything a CLI run needs. Precedence: flags > config file > defaults.
struct RunConfig {
  RunPaths paths;
  EncoderConfig model;  // vocab_size comes from the BPE model
  std::size_t vocab_size = 8192;
  CorpusOptions corpus;
  TrainConfig train;
  std::size_t save_every = 0;  // epochs between checkpoints, 0 = final only
  EvalConfig eval;
  int verbosity = 1;

  std::filesystem::path split_path(Partition p) const {
    return paths.corpus_dir / (std::string(partition_name(p)) + ".jsonl");
  }
};

/// Reads a JSON run config. Relative paths resolve against the config
/// file's directory. Unknown keys and ill-typed values throw ParameterError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir);

std::optional<Activation> parse_activation(std::string_view name);

}  // namespace scs
