// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "scs/bpe.hpp"
#include "scs/language.hpp"

namespace scs {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation : std::uint8_t { Identity = 0, Tanh = 1, Relu = 2 };

std::string_view activation_name(Activation a);

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t dim = 128;
  std::size_t layers = 2;
  Activation activation = Activation::Tanh;

  bool operator==(const EncoderConfig&) const = default;
};

/// Index into EncoderParams::attn: natural-language side or code side.
enum class Side : std::uint8_t { Query = 0, Code = 1 };
inline Side side_of(Modality m) { return m.is_query() ? Side::Query : Side::Code; }

struct MlpLayer {
  RowMatrix weight;  // d x d
  Eigen::VectorXd bias;
};

/// Every learnable tensor of the bag-of-words encoder. The same type holds
/// gradients and optimizer moments.
struct EncoderParams {
  EncoderConfig config;
  RowMatrix embed;                                  // vocab x d, one row per token
  std::array<RowMatrix, Modality::kCount> align;    // per-language maps + query map
  std::vector<MlpLayer> mlp;                        // L layers
  std::array<std::vector<Eigen::VectorXd>, 2> attn; // [side][layer 0..L]
  Eigen::VectorXd fusion_logits;                    // L + 1
  double fusion_scale = 1.0;

  /// All tensors zero (including fusion_scale).
  static EncoderParams zeros(const EncoderConfig& config);
  /// Default initialization: embeddings uniform(+-0.05); query map identity,
  /// code maps identity plus uniform(+-0.01) noise; MLP weights
  /// uniform(+-sqrt(3/d)), zero biases; zero attention vectors (mean pooling
  /// at start); zero fusion logits; scale 1. Values are rounded to float so
  /// the initialization survives a checkpoint round trip unchanged.
  static EncoderParams initialize(const EncoderConfig& config, std::uint64_t seed);

  /// Views over every tensor in checkpoint order: embed, align[0..6], per
  /// layer (weight, bias), attn[query][0..L], attn[code][0..L],
  /// fusion_logits, fusion_scale.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  std::size_t parameter_count() const;

  bool all_finite() const;
  void set_zero();
};

struct EmbeddingVector {
  Eigen::VectorXd values;
  bool normalized = false;
};

/// Intermediate quantities of one forward pass, kept for backpropagation.
struct ForwardTrace {
  std::vector<TokenId> ids;
  Modality modality = Modality::query();
  std::vector<std::uint8_t> mask;           // 1 = real token, 0 = PAD
  std::vector<Eigen::MatrixXd> hidden;      // H_0..H_L, each d x m
  std::vector<Eigen::VectorXd> attention;   // per layer, length m, 0 on PAD
  std::vector<Eigen::VectorXd> pooled;      // per layer, length d
  Eigen::VectorXd fusion_weights;           // softmax(fusion_logits)
  Eigen::VectorXd fused;                    // before normalization
  double norm = 0.0;
  Eigen::VectorXd output;                   // fused / norm
};

/// Column t = align[modality] * embed[ids[t]]. Throws DomainError on ids
/// outside the vocabulary or an empty sequence.
Eigen::MatrixXd embed_and_align(std::span<const TokenId> ids, Modality modality,
                                const EncoderParams& params);

/// H_0 = E', H_j = act(W_j H_{j-1} + b_j) for j = 1..L.
std::vector<Eigen::MatrixXd> mlp_forward(const Eigen::MatrixXd& aligned,
                                         const EncoderParams& params);

/// Softmax of w^T H over the unmasked columns, then the weighted column sum.
/// An empty mask means every column is valid. Throws DomainError when no
/// column is valid.
Eigen::VectorXd attention_pool(const Eigen::MatrixXd& hidden, const Eigen::VectorXd& weight,
                               std::span<const std::uint8_t> mask = {},
                               Eigen::VectorXd* alpha = nullptr);

/// scale * sum_j softmax(logits)_j * pooled[j].
Eigen::VectorXd fuse(std::span<const Eigen::VectorXd> pooled, const Eigen::VectorXd& logits,
                     double scale, Eigen::VectorXd* weights = nullptr);

/// Full encoder: align, MLP, per-layer pooling, fusion, L2 normalization.
/// PAD ids are masked out of pooling. Ids are processed in ascending
/// order, so the result does not depend on their order bit for bit. Throws DomainError for empty or
/// all-PAD input and for a zero or non-finite fused vector.
EmbeddingVector encode(std::span<const TokenId> ids, Modality modality,
                       const EncoderParams& params, ForwardTrace* trace = nullptr);

/// Dot product of two normalized embeddings. Throws ContractError otherwise.
double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b);

/// Accumulates into `grads` the gradient of a scalar loss whose derivative
/// with respect to the normalized output of `trace` is `d_output`.
void encoder_backward(const ForwardTrace& trace, const Eigen::VectorXd& d_output,
                      const EncoderParams& params, EncoderParams& grads);

}  // namespace scs
