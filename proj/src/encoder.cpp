// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/encoder.hpp"

#include <algorithm>

#include <cmath>
#include <random>

#include "scs/error.hpp"

namespace scs {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
  }
  return "?";
}

EncoderParams EncoderParams::zeros(const EncoderConfig& config) {
  if (config.dim == 0) throw ParameterError("embedding dimension must be positive");
  const auto d = static_cast<Eigen::Index>(config.dim);
  EncoderParams p;
  p.config = config;
  p.embed = RowMatrix::Zero(static_cast<Eigen::Index>(config.vocab_size), d);
  for (auto& m : p.align) m = RowMatrix::Zero(d, d);
  p.mlp.resize(config.layers);
  for (auto& layer : p.mlp) {
    layer.weight = RowMatrix::Zero(d, d);
    layer.bias = Eigen::VectorXd::Zero(d);
  }
  for (auto& side : p.attn) side.assign(config.layers + 1, Eigen::VectorXd::Zero(d));
  p.fusion_logits = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.layers + 1));
  p.fusion_scale = 0.0;
  return p;
}

EncoderParams EncoderParams::initialize(const EncoderConfig& config, std::uint64_t seed) {
  EncoderParams p = zeros(config);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double a) {
    return static_cast<double>(
        static_cast<float>(std::uniform_real_distribution<double>(-a, a)(rng)));
  };
  for (Eigen::Index i = 0; i < p.embed.size(); ++i) p.embed.data()[i] = uniform(0.05);
  const auto d = static_cast<Eigen::Index>(config.dim);
  for (std::size_t m = 0; m < Modality::kCount; ++m) {
    p.align[m].setIdentity();
    if (m == Modality::query().index()) continue;
    for (Eigen::Index i = 0; i < p.align[m].size(); ++i) {
      double& x = p.align[m].data()[i];
      x = static_cast<double>(static_cast<float>(x + uniform(0.01)));
    }
  }
  const double limit = std::sqrt(3.0 / static_cast<double>(d));
  for (auto& layer : p.mlp) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = uniform(limit);
  }
  p.fusion_scale = 1.0;
  return p;
}

std::vector<std::span<double>> EncoderParams::tensors() {
  std::vector<std::span<double>> out;
  auto add = [&out](auto& t) { out.emplace_back(t.data(), static_cast<std::size_t>(t.size())); };
  add(embed);
  for (auto& m : align) add(m);
  for (auto& layer : mlp) {
    add(layer.weight);
    add(layer.bias);
  }
  for (auto& side : attn)
    for (auto& w : side) add(w);
  add(fusion_logits);
  out.emplace_back(&fusion_scale, 1);
  return out;
}

std::vector<std::span<const double>> EncoderParams::tensors() const {
  auto spans = const_cast<EncoderParams*>(this)->tensors();
  return {spans.begin(), spans.end()};
}

std::size_t EncoderParams::parameter_count() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.size();
  return n;
}

bool EncoderParams::all_finite() const {
  for (auto t : tensors())
    for (double x : t)
      if (!std::isfinite(x)) return false;
  return true;
}

void EncoderParams::set_zero() {
  for (auto t : tensors()) std::fill(t.begin(), t.end(), 0.0);
}

namespace {

Eigen::MatrixXd gather_embeddings(std::span<const TokenId> ids, const EncoderParams& params) {
  if (ids.empty()) throw DomainError("cannot embed an empty token sequence");
  const auto vocab = params.embed.rows();
  Eigen::MatrixXd x(params.embed.cols(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || ids[t] >= vocab) {
      throw DomainError("token id " + std::to_string(ids[t]) + " outside vocabulary of size " +
                        std::to_string(vocab));
    }
    x.col(static_cast<Eigen::Index>(t)) = params.embed.row(ids[t]).transpose();
  }
  return x;
}

void activate(Eigen::MatrixXd& a, Activation act) {
  switch (act) {
    case Activation::Identity: break;
    case Activation::Tanh: a = a.array().tanh(); break;
    case Activation::Relu: a = a.array().max(0.0); break;
  }
}

/// dL/dA given dL/dH and H = act(A).
Eigen::MatrixXd activation_backward(const Eigen::MatrixXd& d_out, const Eigen::MatrixXd& out,
                                    Activation act) {
  switch (act) {
    case Activation::Identity: return d_out;
    case Activation::Tanh: return d_out.array() * (1.0 - out.array().square());
    case Activation::Relu: return d_out.array() * (out.array() > 0.0).cast<double>();
  }
  return d_out;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  const double mx = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - mx).exp();
  return e / e.sum();
}

}  // namespace

Eigen::MatrixXd embed_and_align(std::span<const TokenId> ids, Modality modality,
                                const EncoderParams& params) {
  return params.align[modality.index()] * gather_embeddings(ids, params);
}

std::vector<Eigen::MatrixXd> mlp_forward(const Eigen::MatrixXd& aligned,
                                         const EncoderParams& params) {
  std::vector<Eigen::MatrixXd> hidden;
  hidden.reserve(params.mlp.size() + 1);
  hidden.push_back(aligned);
  for (const auto& layer : params.mlp) {
    Eigen::MatrixXd a = layer.weight * hidden.back();
    a.colwise() += layer.bias;
    activate(a, params.config.activation);
    hidden.push_back(std::move(a));
  }
  return hidden;
}

Eigen::VectorXd attention_pool(const Eigen::MatrixXd& hidden, const Eigen::VectorXd& weight,
                               std::span<const std::uint8_t> mask, Eigen::VectorXd* alpha) {
  const auto m = hidden.cols();
  if (!mask.empty() && static_cast<Eigen::Index>(mask.size()) != m) {
    throw DomainError("attention mask length does not match the number of columns");
  }
  auto valid = [&](Eigen::Index t) { return mask.empty() || mask[static_cast<std::size_t>(t)]; };

  const Eigen::VectorXd scores = hidden.transpose() * weight;
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < m; ++t)
    if (valid(t)) mx = std::max(mx, scores[t]);
  if (!std::isfinite(mx)) {
    throw DomainError("attention pooling needs at least one unmasked column");
  }
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  double total = 0.0;
  for (Eigen::Index t = 0; t < m; ++t) {
    if (!valid(t)) continue;
    a[t] = std::exp(scores[t] - mx);
    total += a[t];
  }
  a /= total;
  Eigen::VectorXd pooled = hidden * a;
  if (alpha) *alpha = std::move(a);
  return pooled;
}

Eigen::VectorXd fuse(std::span<const Eigen::VectorXd> pooled, const Eigen::VectorXd& logits,
                     double scale, Eigen::VectorXd* weights) {
  if (pooled.empty() || static_cast<Eigen::Index>(pooled.size()) != logits.size()) {
    throw DomainError("fusion needs one logit per pooled vector");
  }
  const Eigen::VectorXd s = softmax(logits);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(pooled.front().size());
  for (std::size_t j = 0; j < pooled.size(); ++j) out += s[static_cast<Eigen::Index>(j)] * pooled[j];
  out *= scale;
  if (weights) *weights = s;
  return out;
}

EmbeddingVector encode(std::span<const TokenId> ids, Modality modality,
                       const EncoderParams& params, ForwardTrace* trace) {
  ForwardTrace local;
  ForwardTrace& tr = trace ? *trace : local;
  // Columns in id order, so every sum is independent of the input order.
  tr.ids.assign(ids.begin(), ids.end());
  std::sort(tr.ids.begin(), tr.ids.end());
  tr.modality = modality;
  tr.mask.resize(tr.ids.size());
  for (std::size_t t = 0; t < tr.ids.size(); ++t) tr.mask[t] = tr.ids[t] != BpeModel::kPad;

  tr.hidden = mlp_forward(embed_and_align(tr.ids, modality, params), params);
  const auto& attn = params.attn[static_cast<std::size_t>(side_of(modality))];
  tr.attention.resize(tr.hidden.size());
  tr.pooled.resize(tr.hidden.size());
  for (std::size_t j = 0; j < tr.hidden.size(); ++j) {
    tr.pooled[j] = attention_pool(tr.hidden[j], attn[j], tr.mask, &tr.attention[j]);
  }
  tr.fused = fuse(tr.pooled, params.fusion_logits, params.fusion_scale, &tr.fusion_weights);
  tr.norm = tr.fused.norm();
  if (!(tr.norm > 0.0) || !std::isfinite(tr.norm)) {
    throw DomainError("encoder produced a zero or non-finite vector");
  }
  tr.output = tr.fused / tr.norm;
  return EmbeddingVector{tr.output, true};
}

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
  auto check = [](const EmbeddingVector& v) {
    if (!v.normalized || std::abs(v.values.norm() - 1.0) > 1e-6) {
      throw ContractError("cosine_sim requires unit-normalized embeddings");
    }
  };
  check(a);
  check(b);
  if (a.values.size() != b.values.size()) throw ContractError("embedding dimensions differ");
  return a.values.dot(b.values);
}

void encoder_backward(const ForwardTrace& tr, const Eigen::VectorXd& d_output,
                      const EncoderParams& params, EncoderParams& grads) {
  const std::size_t levels = tr.hidden.size();
  const auto side = static_cast<std::size_t>(side_of(tr.modality));

  // Normalization u = v / |v|.
  const Eigen::VectorXd d_fused =
      (d_output - tr.output * tr.output.dot(d_output)) / tr.norm;

  // Fusion v = g * sum_j s_j p_j.
  const double g = params.fusion_scale;
  Eigen::VectorXd mixed = Eigen::VectorXd::Zero(d_fused.size());
  for (std::size_t j = 0; j < levels; ++j)
    mixed += tr.fusion_weights[static_cast<Eigen::Index>(j)] * tr.pooled[j];
  grads.fusion_scale += mixed.dot(d_fused);

  Eigen::VectorXd d_s(static_cast<Eigen::Index>(levels));
  for (std::size_t j = 0; j < levels; ++j) d_s[static_cast<Eigen::Index>(j)] = g * tr.pooled[j].dot(d_fused);
  const Eigen::VectorXd& s = tr.fusion_weights;
  grads.fusion_logits += (s.array() * (d_s.array() - s.dot(d_s))).matrix();

  // Pooling p_j = H_j alpha_j, alpha_j = softmax(H_j^T w_j) over valid columns.
  std::vector<Eigen::MatrixXd> d_hidden(levels);
  for (std::size_t j = 0; j < levels; ++j) {
    const Eigen::VectorXd d_pooled = g * s[static_cast<Eigen::Index>(j)] * d_fused;
    const Eigen::MatrixXd& h = tr.hidden[j];
    const Eigen::VectorXd& alpha = tr.attention[j];
    const Eigen::VectorXd d_alpha = h.transpose() * d_pooled;
    const Eigen::VectorXd d_scores = alpha.array() * (d_alpha.array() - alpha.dot(d_alpha));
    grads.attn[side][j] += h * d_scores;
    d_hidden[j] = d_pooled * alpha.transpose() + params.attn[side][j] * d_scores.transpose();
  }

  // MLP, top layer first.
  for (std::size_t j = levels - 1; j >= 1; --j) {
    const auto& layer = params.mlp[j - 1];
    const Eigen::MatrixXd d_pre =
        activation_backward(d_hidden[j], tr.hidden[j], params.config.activation);
    grads.mlp[j - 1].weight.noalias() += d_pre * tr.hidden[j - 1].transpose();
    grads.mlp[j - 1].bias += d_pre.rowwise().sum();
    d_hidden[j - 1].noalias() += layer.weight.transpose() * d_pre;
  }

  // Alignment H_0 = W_lang X and the embedding lookup.
  const Eigen::MatrixXd x = gather_embeddings(tr.ids, params);
  const auto lang = tr.modality.index();
  grads.align[lang].noalias() += d_hidden[0] * x.transpose();
  const Eigen::MatrixXd d_x = params.align[lang].transpose() * d_hidden[0];
  for (std::size_t t = 0; t < tr.ids.size(); ++t) {
    if (!tr.mask[t]) continue;
    grads.embed.row(tr.ids[t]) += d_x.col(static_cast<Eigen::Index>(t)).transpose();
  }
}

}  // namespace scs
