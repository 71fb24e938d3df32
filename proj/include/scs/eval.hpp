// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "scs/bpe.hpp"
#include "scs/corpus.hpp"
#include "scs/encoder.hpp"
#include "scs/index.hpp"

namespace scs {

/// NDCG with binary gains and a log2(i + 1) discount over 1-based ranks.
/// `relevant_by_rank[i]` flags the item at rank i + 1. Throws
/// UndefinedMetricError when nothing is relevant, ParameterError when empty.
double ndcg(std::span<const std::uint8_t> relevant_by_rank,
            std::optional<std::size_t> cutoff = std::nullopt);
double ndcg(std::span<const std::string> ranking, const std::unordered_set<std::string>& relevant,
            std::optional<std::size_t> cutoff = std::nullopt);

/// Rank value for a task whose relevant item was not retrieved.
inline constexpr std::size_t kNotRanked = 0;

/// Mean of 1/rank over tasks; kNotRanked contributes 0.
double mrr(std::span<const std::size_t> ranks);

/// One query with its single relevant snippet and the distractors it is
/// ranked against.
struct EvalTask {
  std::size_t query_entry = 0;  // index into the test split
  Language language = Language::Python;
  std::string relevant_id;
  std::vector<std::string> candidate_ids;  // includes relevant_id
};

struct EvalConfig {
  /// Candidate set size including the relevant snippet.
  std::size_t candidates = 1000;
  std::uint64_t seed = 1;
  std::size_t query_cap = 64;
  std::string model_name = "NBoW+Weighted (this run)";
};

/// For every entry, the entry itself plus up to candidates - 1 distractors
/// drawn without replacement from the same language. Languages with a
/// single entry yield no tasks.
std::vector<EvalTask> make_eval_tasks(const CorpusSplit& test, const EvalConfig& config);

struct LanguageMetrics {
  std::size_t tasks = 0;
  double ndcg = 0.0;
  double mrr = 0.0;
};

/// Published per-language and mean NDCG of the full-scale model, shown as
/// a reference row; not reproducible at desk scale.
struct ReferenceRow {
  const char* model;
  double mean;
  std::array<double, kNumLanguages> per_language;  // Go, Java, JS, Php, Python, Ruby
};
inline constexpr ReferenceRow kPublishedReference = {
    "NBoW+Weighted (published)", 0.3841, {0.3253, 0.4248, 0.3611, 0.3399, 0.4717, 0.3816}};

struct EvalReport {
  std::string model_name;
  std::array<std::optional<LanguageMetrics>, kNumLanguages> per_language;
  double mean_ndcg = 0.0;  // unweighted over present languages
  double mean_mrr = 0.0;
  std::size_t candidates = 0;
  std::uint64_t seed = 0;
  std::size_t skipped_tasks = 0;
  std::vector<std::string> warnings;

  /// Aligned text table: Model, NDCG, Go, Java, JavaScript, Php, Python, Ruby.
  std::string to_table() const;
  std::string to_json() const;
};

/// Returns one score per candidate, in candidate_ids order.
using TaskScorer = std::function<std::vector<double>(const EvalTask&)>;

/// Ranks each task's candidates by (score desc, id asc) and aggregates.
EvalReport evaluate_tasks(std::span<const EvalTask> tasks, const TaskScorer& scorer,
                          const EvalConfig& config);

/// Scores queries from the test split against the index built with the same
/// checkpoint. Throws StalenessError on a fingerprint mismatch.
EvalReport evaluate(const EncoderParams& params, const BpeModel& bpe, const EmbeddingIndex& index,
                    const CorpusSplit& test, const EvalConfig& config);

}  // namespace scs
