// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "scs/error.hpp"

namespace scs {

std::string_view loss_name(LossKind kind) {
  return kind == LossKind::Margin ? "margin" : "softmax";
}

std::optional<LossKind> parse_loss(std::string_view name) {
  if (name == "margin") return LossKind::Margin;
  if (name == "softmax" || name == "in_batch_softmax") return LossKind::InBatchSoftmax;
  return std::nullopt;
}

void TrainConfig::validate() const {
  if (!(margin > 0.0)) throw ParameterError("margin must be positive");
  if (!(temperature > 0.0)) throw ParameterError("temperature must be positive");
  if (batch_size < 1) throw ParameterError("batch size must be at least 1");
  if (loss == LossKind::InBatchSoftmax && batch_size < 2) {
    throw ParameterError("in-batch softmax loss needs batch size >= 2");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ParameterError("learning rate must be finite and non-negative");
  }
  if (!(clip_norm > 0.0)) throw ParameterError("clip norm must be positive");
}

std::vector<TrainingPair> prepare_pairs(const CorpusSplit& split, const BpeModel& bpe,
                                        const CorpusOptions& caps, std::size_t* skipped) {
  std::vector<TrainingPair> pairs;
  pairs.reserve(split.entries.size());
  std::size_t dropped = 0;
  for (const auto& e : split.entries) {
    TrainingPair p;
    p.doc = tokenize_surface(e.doc_tokens, bpe, caps.max_doc_tokens);
    p.code = tokenize_surface(e.code_tokens, bpe, caps.max_code_tokens);
    p.language = e.language;
    if (p.doc.empty() || p.code.empty()) {
      ++dropped;
      continue;
    }
    pairs.push_back(std::move(p));
  }
  if (skipped) *skipped = dropped;
  return pairs;
}

double margin_loss(double sim_pos, double sim_neg, double margin) {
  return std::max(0.0, margin - sim_pos + sim_neg);
}

double in_batch_softmax_loss(const Eigen::MatrixXd& sims, double temperature,
                             Eigen::MatrixXd* grad) {
  const auto b = sims.rows();
  if (b != sims.cols()) throw ParameterError("similarity matrix must be square");
  if (b < 2) throw ParameterError("in-batch softmax loss needs at least two rows");
  if (!(temperature > 0.0)) throw ParameterError("temperature must be positive");
  double total = 0.0;
  if (grad) grad->setZero(b, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Eigen::VectorXd z = sims.row(i).transpose() / temperature;
    const double mx = z.maxCoeff();
    const Eigen::VectorXd e = (z.array() - mx).exp();
    const double sum = e.sum();
    total += std::log(sum) + mx - z[i];
    if (grad) {
      grad->row(i) = (e / sum).transpose();
      (*grad)(i, i) -= 1.0;
    }
  }
  if (grad) *grad /= temperature * static_cast<double>(b);
  return total / static_cast<double>(b);
}

std::vector<std::size_t> sample_negatives(std::span<const std::size_t> positives,
                                          std::size_t corpus_size, std::mt19937_64& rng) {
  if (corpus_size < 2) throw ParameterError("negative sampling needs at least two entries");
  std::uniform_int_distribution<std::size_t> pick(0, corpus_size - 2);
  std::vector<std::size_t> out;
  out.reserve(positives.size());
  for (std::size_t pos : positives) {
    std::size_t j = pick(rng);
    if (j >= pos) ++j;
    out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> mine_hard_negatives(const Eigen::MatrixXd& sims) {
  const auto b = sims.rows();
  std::vector<std::size_t> out(static_cast<std::size_t>(b));
  for (Eigen::Index i = 0; i < b; ++i) {
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < sims.cols(); ++j) {
      if (j == i) continue;
      if (best < 0 || sims(i, j) > sims(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best < 0 ? i : best);
  }
  return out;
}

double batch_loss(const EncoderParams& params, std::span<const TrainingPair> pairs,
                  const BatchSpec& batch, const TrainConfig& config, EncoderParams* grads) {
  const std::size_t b = batch.members.size();
  if (b == 0) throw ParameterError("empty batch");
  const bool margin = config.loss == LossKind::Margin;
  const bool mine = margin && batch.negatives.empty();
  if (margin && !mine && batch.negatives.size() != b) {
    throw ParameterError("one negative per batch member is required");
  }
  if (!margin && b < 2) throw ParameterError("in-batch softmax loss needs batch size >= 2");
  if (mine && b < 2) throw ParameterError("hard negative mining needs batch size >= 2");

  // Code encodings are shared between a member's positive and any query that
  // uses it as a negative.
  std::vector<ForwardTrace> doc_traces(b);
  std::vector<ForwardTrace> code_traces;
  std::unordered_map<std::size_t, std::size_t> code_slot;
  auto encode_code = [&](std::size_t pair_index) {
    auto [it, inserted] = code_slot.emplace(pair_index, code_traces.size());
    if (inserted) {
      code_traces.emplace_back();
      const auto& p = pairs[pair_index];
      encode(p.code, Modality::code(p.language), params, &code_traces.back());
    }
    return it->second;
  };

  for (std::size_t i = 0; i < b; ++i) {
    encode(pairs[batch.members[i]].doc, Modality::query(), params, &doc_traces[i]);
  }
  std::vector<std::size_t> pos_slot(b);
  for (std::size_t i = 0; i < b; ++i) pos_slot[i] = encode_code(batch.members[i]);

  std::vector<Eigen::VectorXd> d_doc(b), d_code;
  double loss = 0.0;

  if (margin) {
    std::vector<std::size_t> neg_slot(b);
    if (mine) {
      Eigen::MatrixXd sims(b, b);
      for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j)
          sims(i, j) = doc_traces[i].output.dot(code_traces[pos_slot[j]].output);
      const auto hardest = mine_hard_negatives(sims);
      for (std::size_t i = 0; i < b; ++i) neg_slot[i] = pos_slot[hardest[i]];
    } else {
      for (std::size_t i = 0; i < b; ++i) neg_slot[i] = encode_code(batch.negatives[i]);
    }
    if (grads) d_code.assign(code_traces.size(), Eigen::VectorXd::Zero(params.config.dim));
    const double inv_b = 1.0 / static_cast<double>(b);
    for (std::size_t i = 0; i < b; ++i) {
      const auto& q = doc_traces[i].output;
      const auto& c = code_traces[pos_slot[i]].output;
      const auto& n = code_traces[neg_slot[i]].output;
      const double sp = q.dot(c);
      const double sn = q.dot(n);
      const double l = margin_loss(sp, sn, config.margin);
      loss += l * inv_b;
      if (!grads) continue;
      if (config.margin - sp + sn > 0.0) {
        d_doc[i] = (n - c) * inv_b;
        d_code[pos_slot[i]] -= q * inv_b;
        d_code[neg_slot[i]] += q * inv_b;
      } else {
        d_doc[i] = Eigen::VectorXd::Zero(q.size());
      }
    }
  } else {
    Eigen::MatrixXd sims(b, b);
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < b; ++j)
        sims(i, j) = doc_traces[i].output.dot(code_traces[pos_slot[j]].output);
    Eigen::MatrixXd d_sims;
    loss = in_batch_softmax_loss(sims, config.temperature, grads ? &d_sims : nullptr);
    if (grads) {
      d_code.assign(code_traces.size(), Eigen::VectorXd::Zero(params.config.dim));
      for (std::size_t i = 0; i < b; ++i) {
        d_doc[i] = Eigen::VectorXd::Zero(params.config.dim);
        for (std::size_t j = 0; j < b; ++j) {
          d_doc[i] += d_sims(i, j) * code_traces[pos_slot[j]].output;
          d_code[pos_slot[j]] += d_sims(i, j) * doc_traces[i].output;
        }
      }
    }
  }

  if (grads) {
    for (std::size_t i = 0; i < b; ++i) {
      if (!d_doc[i].isZero(0.0)) encoder_backward(doc_traces[i], d_doc[i], params, *grads);
    }
    for (std::size_t k = 0; k < code_traces.size(); ++k) {
      if (!d_code[k].isZero(0.0)) encoder_backward(code_traces[k], d_code[k], params, *grads);
    }
  }
  return loss;
}

AdamOptimizer::AdamOptimizer(const EncoderParams& like, const TrainConfig& config)
    : first_(EncoderParams::zeros(like.config)),
      second_(EncoderParams::zeros(like.config)),
      beta1_(config.beta1),
      beta2_(config.beta2),
      epsilon_(config.epsilon),
      learning_rate_(config.learning_rate) {}

void AdamOptimizer::step(EncoderParams& params, const EncoderParams& grads) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = first_.tensors();
  auto v = second_.tensors();
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (std::size_t i = 0; i < p[t].size(); ++i) {
      const double gi = g[t][i];
      m[t][i] = beta1_ * m[t][i] + (1.0 - beta1_) * gi;
      v[t][i] = beta2_ * v[t][i] + (1.0 - beta2_) * gi * gi;
      const double m_hat = m[t][i] / c1;
      const double v_hat = v[t][i] / c2;
      p[t][i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
  }
}

double clip_global_norm(EncoderParams& grads, double max_norm) {
  double sq = 0.0;
  for (auto t : std::as_const(grads).tensors())
    for (double x : t) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto t : grads.tensors())
      for (double& x : t) x *= scale;
  }
  return norm;
}

namespace {

std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> order,
                                                   std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const auto end = std::min(order.size(), start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  // A trailing singleton cannot form in-batch negatives.
  if (batches.size() > 1 && batches.back().size() < 2) {
    auto last = std::move(batches.back());
    batches.pop_back();
    batches.back().insert(batches.back().end(), last.begin(), last.end());
  }
  return batches;
}

}  // namespace

TrainResult train(const TrainConfig& config, std::span<const TrainingPair> pairs,
                  EncoderParams params, const EpochCallback& on_epoch) {
  config.validate();
  if (pairs.empty()) throw ParameterError("training split is empty");
  if (pairs.size() < 2) throw ParameterError("training needs at least two pairs");

  std::mt19937_64 rng(config.seed);
  AdamOptimizer optimizer(params, config);
  EncoderParams grads = EncoderParams::zeros(params.config);
  TrainResult result;

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const auto batches = make_batches(order, config.batch_size);
    const bool mining =
        config.loss == LossKind::Margin && config.hard_mining && epoch > 1;
    double weighted = 0.0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      BatchSpec spec;
      spec.members = batches[bi];
      if (config.loss == LossKind::Margin && !(mining && spec.members.size() >= 2)) {
        spec.negatives = sample_negatives(spec.members, pairs.size(), rng);
      }
      grads.set_zero();
      const auto fail = [&](const std::string& what) {
        std::ostringstream msg;
        msg << what << " in epoch " << epoch << " batch " << bi + 1 << " (first pair "
            << spec.members.front() << ")";
        throw TrainingError(msg.str());
      };
      double loss = 0.0;
      try {
        loss = batch_loss(params, pairs, spec, config, &grads);
      } catch (const DomainError& e) {
        fail(e.what());
      }
      if (!std::isfinite(loss)) fail("non-finite loss");
      clip_global_norm(grads, config.clip_norm);
      optimizer.step(params, grads);
      if (!params.all_finite()) {
        throw TrainingError("non-finite parameter after epoch " + std::to_string(epoch) +
                            " batch " + std::to_string(bi + 1));
      }
      weighted += loss * static_cast<double>(spec.members.size());
    }
    const double epoch_loss = weighted / static_cast<double>(pairs.size());
    result.epoch_loss.push_back(epoch_loss);
    if (on_epoch) on_epoch({epoch, epoch_loss, config.learning_rate}, params);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace scs
