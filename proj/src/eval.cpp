// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "scs/checkpoint.hpp"
#include "scs/error.hpp"

namespace scs {

double ndcg(std::span<const std::uint8_t> relevant_by_rank, std::optional<std::size_t> cutoff) {
  if (relevant_by_rank.empty()) throw UndefinedMetricError("ndcg of an empty ranking");
  if (cutoff && *cutoff == 0) throw ParameterError("ndcg cutoff must be positive");
  const std::size_t limit = std::min(relevant_by_rank.size(), cutoff.value_or(relevant_by_rank.size()));
  std::size_t num_relevant = 0;
  for (auto r : relevant_by_rank) num_relevant += r ? 1 : 0;
  if (num_relevant == 0) throw UndefinedMetricError("ndcg undefined without a relevant item");

  double dcg = 0.0;
  for (std::size_t i = 0; i < limit; ++i) {
    if (relevant_by_rank[i]) dcg += 1.0 / std::log2(static_cast<double>(i + 2));
  }
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(limit, num_relevant); ++i) {
    idcg += 1.0 / std::log2(static_cast<double>(i + 2));
  }
  return dcg / idcg;
}

double ndcg(std::span<const std::string> ranking, const std::unordered_set<std::string>& relevant,
            std::optional<std::size_t> cutoff) {
  std::vector<std::uint8_t> flags(ranking.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) flags[i] = relevant.count(ranking[i]) ? 1 : 0;
  return ndcg(flags, cutoff);
}

double mrr(std::span<const std::size_t> ranks) {
  if (ranks.empty()) throw UndefinedMetricError("mrr needs at least one task");
  double total = 0.0;
  for (auto r : ranks) total += r == kNotRanked ? 0.0 : 1.0 / static_cast<double>(r);
  return total / static_cast<double>(ranks.size());
}

std::vector<EvalTask> make_eval_tasks(const CorpusSplit& test, const EvalConfig& config) {
  if (config.candidates < 2) throw ParameterError("candidate set size must be at least 2");
  std::array<std::vector<std::size_t>, kNumLanguages> by_lang;
  for (std::size_t i = 0; i < test.entries.size(); ++i) {
    by_lang[static_cast<std::size_t>(test.entries[i].language)].push_back(i);
  }
  std::mt19937_64 rng(config.seed);
  std::vector<EvalTask> tasks;
  std::vector<std::size_t> pool;
  for (const auto& members : by_lang) {
    if (members.size() < 2) continue;
    const std::size_t draw = std::min(config.candidates - 1, members.size() - 1);
    for (std::size_t qi = 0; qi < members.size(); ++qi) {
      EvalTask task;
      task.query_entry = members[qi];
      task.language = test.entries[members[qi]].language;
      task.relevant_id = test.entries[members[qi]].id;
      task.candidate_ids.push_back(task.relevant_id);
      // Partial Fisher-Yates over the other members.
      pool.clear();
      for (std::size_t j = 0; j < members.size(); ++j)
        if (j != qi) pool.push_back(members[j]);
      for (std::size_t k = 0; k < draw; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
        std::swap(pool[k], pool[pick(rng)]);
        task.candidate_ids.push_back(test.entries[pool[k]].id);
      }
      tasks.push_back(std::move(task));
    }
  }
  return tasks;
}

namespace {

std::string fixed(double x, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

}  // namespace

EvalReport evaluate_tasks(std::span<const EvalTask> tasks, const TaskScorer& scorer,
                          const EvalConfig& config) {
  EvalReport report;
  report.model_name = config.model_name;
  report.candidates = config.candidates;
  report.seed = config.seed;

  std::array<std::vector<std::size_t>, kNumLanguages> ranks;
  std::array<double, kNumLanguages> ndcg_sum{};
  for (const auto& task : tasks) {
    const auto scores = scorer(task);
    if (scores.size() != task.candidate_ids.size()) {
      throw ContractError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                          std::to_string(task.candidate_ids.size()) + " candidates");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return task.candidate_ids[a] < task.candidate_ids[b];
    });
    std::vector<std::uint8_t> flags(order.size());
    std::size_t rank = kNotRanked;
    for (std::size_t r = 0; r < order.size(); ++r) {
      flags[r] = task.candidate_ids[order[r]] == task.relevant_id;
      if (flags[r] && rank == kNotRanked) rank = r + 1;
    }
    if (rank == kNotRanked) {
      ++report.skipped_tasks;
      continue;
    }
    const auto li = static_cast<std::size_t>(task.language);
    ranks[li].push_back(rank);
    ndcg_sum[li] += ndcg(flags);
  }

  std::size_t present = 0;
  for (std::size_t li = 0; li < kNumLanguages; ++li) {
    if (ranks[li].empty()) {
      report.warnings.push_back(std::string("no test tasks for ") +
                                std::string(language_label(static_cast<Language>(li))));
      continue;
    }
    LanguageMetrics m;
    m.tasks = ranks[li].size();
    m.ndcg = ndcg_sum[li] / static_cast<double>(m.tasks);
    m.mrr = mrr(ranks[li]);
    report.mean_ndcg += m.ndcg;
    report.mean_mrr += m.mrr;
    report.per_language[li] = m;
    ++present;
  }
  if (present == 0) throw UndefinedMetricError("no evaluable tasks in the test split");
  report.mean_ndcg /= static_cast<double>(present);
  report.mean_mrr /= static_cast<double>(present);
  return report;
}

EvalReport evaluate(const EncoderParams& params, const BpeModel& bpe, const EmbeddingIndex& index,
                    const CorpusSplit& test, const EvalConfig& config) {
  if (model_fingerprint(params) != index.fingerprint()) {
    throw StalenessError("index was built with a different model checkpoint");
  }
  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t i = 0; i < index.size(); ++i) row_of.emplace(index.entries()[i].id, i);

  // Candidates absent from the index (skipped at build time) are dropped;
  // a task whose relevant snippet is absent is skipped.
  std::vector<EvalTask> tasks;
  std::size_t missing = 0;
  for (auto& task : make_eval_tasks(test, config)) {
    if (!row_of.count(task.relevant_id)) {
      ++missing;
      continue;
    }
    std::erase_if(task.candidate_ids, [&](const std::string& id) { return !row_of.count(id); });
    if (task.candidate_ids.size() < 2) {
      ++missing;
      continue;
    }
    tasks.push_back(std::move(task));
  }

  const std::size_t d = index.dim();
  std::size_t failed_queries = 0;
  auto scorer = [&](const EvalTask& task) {
    const auto& entry = test.entries[task.query_entry];
    const auto ids = tokenize_surface(entry.doc_tokens, bpe, config.query_cap);
    std::vector<double> scores(task.candidate_ids.size(), 0.0);
    Eigen::VectorXd q;
    try {
      q = encode(ids, Modality::query(), params).values;
    } catch (const DomainError&) {
      ++failed_queries;
      return scores;
    }
    for (std::size_t c = 0; c < task.candidate_ids.size(); ++c) {
      const auto row = index.row(row_of.at(task.candidate_ids[c]));
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += double{row[k]} * q[static_cast<Eigen::Index>(k)];
      scores[c] = acc;
    }
    return scores;
  };
  EvalReport report = evaluate_tasks(tasks, scorer, config);
  report.skipped_tasks += missing;
  if (missing) {
    report.warnings.push_back(std::to_string(missing) + " tasks skipped (snippet not indexed)");
  }
  if (failed_queries) {
    report.warnings.push_back(std::to_string(failed_queries) +
                              " queries could not be encoded and scored as ties");
  }
  return report;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  const int name_w = 28;
  auto header = [&] {
    out << std::left << std::setw(name_w) << "Model" << std::right << std::setw(8) << "NDCG";
    for (auto lang : kAllLanguages) out << std::setw(12) << language_label(lang);
    out << '\n';
  };
  header();
  out << std::left << std::setw(name_w) << kPublishedReference.model << std::right << std::setw(8)
      << fixed(kPublishedReference.mean);
  for (double v : kPublishedReference.per_language) out << std::setw(12) << fixed(v);
  out << '\n';
  out << std::left << std::setw(name_w) << model_name << std::right << std::setw(8)
      << fixed(mean_ndcg);
  for (const auto& m : per_language) out << std::setw(12) << (m ? fixed(m->ndcg) : "-");
  out << '\n';
  out << std::left << std::setw(name_w) << "  MRR" << std::right << std::setw(8) << fixed(mean_mrr);
  for (const auto& m : per_language) out << std::setw(12) << (m ? fixed(m->mrr) : "-");
  out << '\n';
  out << std::left << std::setw(name_w) << "  tasks" << std::right << std::setw(8) << "";
  for (const auto& m : per_language) out << std::setw(12) << (m ? std::to_string(m->tasks) : "0");
  out << '\n';
  out << "candidates per query: " << candidates << ", seed: " << seed
      << ", skipped tasks: " << skipped_tasks << '\n';
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["mean_ndcg"] = mean_ndcg;
  j["mean_mrr"] = mean_mrr;
  auto& langs = j["languages"];
  langs = nlohmann::ordered_json::object();
  for (std::size_t li = 0; li < kNumLanguages; ++li) {
    const auto tag = std::string(language_tag(static_cast<Language>(li)));
    if (!per_language[li]) {
      langs[tag] = nullptr;
      continue;
    }
    langs[tag] = {{"tasks", per_language[li]->tasks},
                  {"ndcg", per_language[li]->ndcg},
                  {"mrr", per_language[li]->mrr}};
  }
  j["config"] = {{"candidates", candidates}, {"seed", seed}};
  j["skipped_tasks"] = skipped_tasks;
  j["warnings"] = warnings;
  j["reference"] = {{"model", kPublishedReference.model}, {"mean_ndcg", kPublishedReference.mean}};
  return j.dump(2) + "\n";
}

}  // namespace scs
