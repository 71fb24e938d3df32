// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include <gtest/gtest.h>

#include "scs/config.hpp"
#include "scs/error.hpp"
#include "test_util.hpp"

namespace scs {
namespace {

TEST(RunConfig, DefaultsWithoutFile) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.model.dim, 128u);
  EXPECT_EQ(cfg.model.layers, 2u);
  EXPECT_EQ(cfg.model.activation, Activation::Tanh);
  EXPECT_EQ(cfg.train.margin, 0.5);
  EXPECT_EQ(cfg.train.batch_size, 256u);
  EXPECT_EQ(cfg.train.learning_rate, 1e-3);
  EXPECT_EQ(cfg.train.temperature, 0.05);
  EXPECT_EQ(cfg.eval.candidates, 1000u);
  EXPECT_EQ(cfg.vocab_size, 8192u);
  EXPECT_EQ(cfg.corpus.max_doc_tokens, 64u);
  EXPECT_EQ(cfg.corpus.max_code_tokens, 256u);
}

TEST(RunConfig, LoadsFileAndResolvesRelativePaths) {
  const auto path = testing::fixture("run_config.json");
  const auto cfg = load_run_config(path);
  EXPECT_EQ(cfg.paths.corpus_dir, path.parent_path() / "corpus");
  EXPECT_EQ(cfg.paths.vocab, path.parent_path() / "out/vocab.txt");
  EXPECT_EQ(cfg.paths.checkpoint, "/abs/model.ckpt");
  EXPECT_EQ(cfg.model.dim, 16u);
  EXPECT_EQ(cfg.model.layers, 1u);
  EXPECT_EQ(cfg.model.activation, Activation::Relu);
  EXPECT_EQ(cfg.vocab_size, 300u);
  EXPECT_EQ(cfg.train.loss, LossKind::InBatchSoftmax);
  EXPECT_EQ(cfg.train.epochs, 3u);
  EXPECT_TRUE(cfg.train.hard_mining);
  EXPECT_EQ(cfg.train.margin, 0.5);
  EXPECT_EQ(cfg.eval.candidates, 50u);
  EXPECT_EQ(cfg.eval.seed, 9u);
  EXPECT_EQ(cfg.verbosity, 0);
  EXPECT_EQ(cfg.split_path(Partition::Valid), path.parent_path() / "corpus/valid.jsonl");
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_run_config(R"({"trian": {}})", "."), ParameterError);
  EXPECT_THROW(parse_run_config(R"({"train": {"epoch": 3}})", "."), ParameterError);
  EXPECT_THROW(parse_run_config(R"({"train": {"epochs": "3"}})", "."), ParameterError);
  EXPECT_THROW(parse_run_config(R"({"train": {"loss": "hinge"}})", "."), ParameterError);
  EXPECT_THROW(parse_run_config(R"({"model": {"activation": "gelu"}})", "."), ParameterError);
  EXPECT_THROW(parse_run_config(R"({"model": {"dim": 0}})", "."), ParameterError);
  EXPECT_THROW(parse_run_config("{not json", "."), ParameterError);
  EXPECT_THROW(parse_run_config("[]", "."), ParameterError);
  EXPECT_THROW(load_run_config("/nonexistent/run.json"), ParameterError);
}

TEST(RunConfig, EmptyObjectKeepsDefaults) {
  const auto cfg = parse_run_config("{}", "/base");
  EXPECT_EQ(cfg.model.dim, 128u);
  EXPECT_TRUE(cfg.paths.vocab.empty());
}

}  // namespace
}  // namespace scs
