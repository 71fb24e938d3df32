// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "scs/bpe.hpp"
#include "scs/corpus.hpp"
#include "scs/encoder.hpp"

namespace scs {

enum class LossKind : std::uint8_t { Margin, InBatchSoftmax };

std::string_view loss_name(LossKind kind);
std::optional<LossKind> parse_loss(std::string_view name);

struct TrainConfig {
  LossKind loss = LossKind::Margin;
  double margin = 0.5;
  std::size_t batch_size = 256;
  std::size_t epochs = 10;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  /// Margin loss only: from epoch 2 on, each query's negative is the most
  /// similar other code in its batch instead of a random draw.
  bool hard_mining = false;
  double temperature = 0.05;
  double clip_norm = 5.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  /// Throws ParameterError describing the first violated constraint.
  void validate() const;
};

/// A tokenized docstring/function pair. The docstring is the query side.
struct TrainingPair {
  std::vector<TokenId> doc;
  std::vector<TokenId> code;
  Language language = Language::Python;
};

/// Tokenizes a split; entries whose doc or code side tokenizes to nothing
/// are skipped and counted in `skipped`.
std::vector<TrainingPair> prepare_pairs(const CorpusSplit& split, const BpeModel& bpe,
                                        const CorpusOptions& caps = {},
                                        std::size_t* skipped = nullptr);

/// max(0, margin - sim_pos + sim_neg)
double margin_loss(double sim_pos, double sim_neg, double margin);

/// Mean over rows of -log softmax(sims.row(i) / temperature)[i]. When
/// `grad` is given it receives d loss / d sims. Throws ParameterError for
/// fewer than two rows or a non-square matrix.
double in_batch_softmax_loss(const Eigen::MatrixXd& sims, double temperature,
                             Eigen::MatrixXd* grad = nullptr);

/// For each positive index, a uniform draw from [0, corpus_size) excluding
/// that index. Throws ParameterError when corpus_size < 2.
std::vector<std::size_t> sample_negatives(std::span<const std::size_t> positives,
                                          std::size_t corpus_size, std::mt19937_64& rng);

/// Row-wise argmax over j != i; ties go to the smallest j.
std::vector<std::size_t> mine_hard_negatives(const Eigen::MatrixXd& sims);

/// One optimization batch over `pairs`. For the margin loss, `negatives[i]`
/// is the pair whose code is the negative for `members[i]`; leave it empty
/// to mine the hardest in-batch negatives instead.
struct BatchSpec {
  std::vector<std::size_t> members;
  std::vector<std::size_t> negatives;
};

/// Mean loss of the batch. When `grads` is non-null the exact gradient is
/// accumulated into it.
double batch_loss(const EncoderParams& params, std::span<const TrainingPair> pairs,
                  const BatchSpec& batch, const TrainConfig& config,
                  EncoderParams* grads = nullptr);

/// Adaptive-moment optimizer with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(const EncoderParams& like, const TrainConfig& config);
  void step(EncoderParams& params, const EncoderParams& grads);

 private:
  EncoderParams first_;
  EncoderParams second_;
  double beta1_, beta2_, epsilon_, learning_rate_;
  std::uint64_t steps_ = 0;
};

/// Scales `grads` so its global L2 norm is at most `max_norm`; returns the
/// norm before clipping.
double clip_global_norm(EncoderParams& grads, double max_norm);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  EncoderParams params;
  std::vector<double> epoch_loss;
};

using EpochCallback = std::function<void(const EpochStats&, const EncoderParams&)>;

/// Runs `config.epochs` epochs of shuffled mini-batches. Deterministic for a
/// fixed seed. Throws TrainingError naming the batch on a non-finite loss.
TrainResult train(const TrainConfig& config, std::span<const TrainingPair> pairs,
                  EncoderParams params, const EpochCallback& on_epoch = {});

}  // namespace scs
