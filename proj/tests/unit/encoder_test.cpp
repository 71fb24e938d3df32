// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scs/encoder.hpp"
#include "scs/error.hpp"

namespace scs {
namespace {

EncoderConfig config(std::size_t vocab, std::size_t d, std::size_t layers,
                     Activation act = Activation::Tanh) {
  return {vocab, d, layers, act};
}

TEST(EmbedAndAlign, IdentityMapReturnsEmbeddingRows) {
  auto p = oracle::random_params(config(10, 4, 1), 1);
  p.align[Modality::query().index()] = RowMatrix::Identity(4, 4);
  const std::vector<TokenId> ids = {3, 7};
  const auto e = embed_and_align(ids, Modality::query(), p);
  ASSERT_EQ(e.cols(), 2);
  EXPECT_EQ(Eigen::VectorXd(e.col(0)), Eigen::VectorXd(p.embed.row(3).transpose()));
  EXPECT_EQ(Eigen::VectorXd(e.col(1)), Eigen::VectorXd(p.embed.row(7).transpose()));
}

TEST(EmbedAndAlign, ZeroMapGivesZeros) {
  auto p = oracle::random_params(config(10, 4, 1), 1);
  p.align[Modality::code(Language::Go).index()].setZero();
  const std::vector<TokenId> ids = {3, 4, 5};
  EXPECT_TRUE(embed_and_align(ids, Modality::code(Language::Go), p).isZero(0.0));
}

TEST(EmbedAndAlign, SwapMap) {
  auto p = EncoderParams::zeros(config(4, 2, 0));
  p.embed.row(3) << 1.0, 2.0;
  p.align[Modality::code(Language::Java).index()] << 0.0, 1.0, 1.0, 0.0;
  const std::vector<TokenId> ids = {3};
  const auto e = embed_and_align(ids, Modality::code(Language::Java), p);
  EXPECT_DOUBLE_EQ(e(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(e(1, 0), 1.0);
}

TEST(EmbedAndAlign, RejectsBadIds) {
  const auto p = oracle::random_params(config(10, 4, 1), 1);
  const std::vector<TokenId> too_big = {10};
  const std::vector<TokenId> negative = {-1};
  EXPECT_THROW(embed_and_align(too_big, Modality::query(), p), DomainError);
  EXPECT_THROW(embed_and_align(negative, Modality::query(), p), DomainError);
  EXPECT_THROW(embed_and_align({}, Modality::query(), p), DomainError);
}

TEST(MlpForward, NoLayersReturnsInput) {
  const auto p = oracle::random_params(config(10, 3, 0), 2);
  const Eigen::MatrixXd e = Eigen::MatrixXd::Random(3, 5);
  const auto h = mlp_forward(e, p);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0], e);
}

TEST(MlpForward, IdentityLayerIsANoOp) {
  auto p = EncoderParams::zeros(config(10, 3, 1, Activation::Identity));
  p.mlp[0].weight = RowMatrix::Identity(3, 3);
  const Eigen::MatrixXd e = Eigen::MatrixXd::Random(3, 4);
  const auto h = mlp_forward(e, p);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[1], e);
}

TEST(MlpForward, ScalarTanh) {
  auto p = EncoderParams::zeros(config(4, 1, 1, Activation::Tanh));
  p.mlp[0].weight(0, 0) = 3.0;
  p.mlp[0].bias(0) = -1.0;
  Eigen::MatrixXd e(1, 1);
  e << 2.0;
  const auto h = mlp_forward(e, p);
  EXPECT_NEAR(h[1](0, 0), 0.999909, 5e-7);
  EXPECT_DOUBLE_EQ(h[1](0, 0), std::tanh(5.0));
}

TEST(MlpForward, Relu) {
  auto p = EncoderParams::zeros(config(4, 2, 1, Activation::Relu));
  p.mlp[0].weight = RowMatrix::Identity(2, 2);
  Eigen::MatrixXd e(2, 1);
  e << -1.0, 2.0;
  const auto h = mlp_forward(e, p);
  EXPECT_DOUBLE_EQ(h[1](0, 0), 0.0);
  EXPECT_DOUBLE_EQ(h[1](1, 0), 2.0);
}

TEST(AttentionPool, ZeroWeightsAverage) {
  Eigen::MatrixXd h(2, 2);
  h << 1, 0, 0, 1;
  const auto p = attention_pool(h, Eigen::VectorXd::Zero(2));
  EXPECT_DOUBLE_EQ(p(0), 0.5);
  EXPECT_DOUBLE_EQ(p(1), 0.5);
}

TEST(AttentionPool, SingleColumnPassesThrough) {
  Eigen::MatrixXd h(3, 1);
  h << 0.3, -2.0, 7.0;
  Eigen::VectorXd w(3);
  w << 5, -4, 1;
  EXPECT_EQ(attention_pool(h, w), Eigen::VectorXd(h.col(0)));
}

TEST(AttentionPool, SoftmaxWeights) {
  Eigen::MatrixXd h(2, 2);
  h << 1, 0, 0, 1;
  Eigen::VectorXd w(2);
  w << 1, 0;
  Eigen::VectorXd alpha;
  const auto p = attention_pool(h, w, {}, &alpha);
  const double e = std::exp(1.0);
  EXPECT_NEAR(alpha(0), e / (e + 1.0), 1e-15);
  EXPECT_NEAR(alpha(0), 0.73106, 5e-6);
  EXPECT_NEAR(alpha(1), 0.26894, 5e-6);
  EXPECT_NEAR(p(0), 0.73106, 5e-6);
  EXPECT_NEAR(p(1), 0.26894, 5e-6);
}

TEST(AttentionPool, MaskExcludesColumns) {
  Eigen::MatrixXd h(1, 3);
  h << 1, 100, 3;
  const std::vector<std::uint8_t> mask = {1, 0, 1};
  Eigen::VectorXd alpha;
  const auto p = attention_pool(h, Eigen::VectorXd::Zero(1), mask, &alpha);
  EXPECT_DOUBLE_EQ(p(0), 2.0);
  EXPECT_EQ(alpha(1), 0.0);
  const std::vector<std::uint8_t> none = {0, 0, 0};
  EXPECT_THROW(attention_pool(h, Eigen::VectorXd::Zero(1), none), DomainError);
}

TEST(AttentionPool, HugeScoresStayFinite) {
  Eigen::MatrixXd h(1, 2);
  h << 1000, -1000;
  Eigen::VectorXd w(1);
  w << 10;
  const auto p = attention_pool(h, w);
  EXPECT_DOUBLE_EQ(p(0), 1000.0);
}

TEST(Fuse, SingleLayerIdentity) {
  Eigen::VectorXd p0(2);
  p0 << 0.25, -4;
  const std::vector<Eigen::VectorXd> pooled = {p0};
  EXPECT_EQ(fuse(pooled, Eigen::VectorXd::Zero(1), 1.0), p0);
}

TEST(Fuse, ZeroScaleAnnihilates) {
  const std::vector<Eigen::VectorXd> pooled = {Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3)};
  EXPECT_TRUE(fuse(pooled, Eigen::VectorXd::Zero(2), 0.0).isZero(0.0));
}

TEST(Fuse, EqualLogitsScaledSum) {
  Eigen::VectorXd a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  const std::vector<Eigen::VectorXd> pooled = {a, b};
  Eigen::VectorXd weights;
  const auto out = fuse(pooled, Eigen::VectorXd::Constant(2, 0.7), 2.0, &weights);
  EXPECT_DOUBLE_EQ(weights(0), 0.5);
  EXPECT_DOUBLE_EQ(out(0), 1.0);
  EXPECT_DOUBLE_EQ(out(1), 1.0);
}

TEST(Encode, OutputIsUnitAndDeterministic) {
  const auto p = oracle::random_params(config(30, 8, 2), 4);
  const std::vector<TokenId> ids = {5, 9, 9, 20};
  const auto a = encode(ids, Modality::code(Language::Ruby), p);
  const auto b = encode(ids, Modality::code(Language::Ruby), p);
  EXPECT_TRUE(a.normalized);
  EXPECT_NEAR(a.values.norm(), 1.0, 1e-12);
  EXPECT_EQ(a.values, b.values);
}

TEST(Encode, EqualsComposedSubOperations) {
  const auto p = oracle::random_params(config(20, 6, 2), 7);
  const std::vector<TokenId> ids = {4, 11, 17};
  const auto m = Modality::code(Language::Php);
  const auto e = embed_and_align(ids, m, p);
  const auto hidden = mlp_forward(e, p);
  std::vector<Eigen::VectorXd> pooled;
  for (std::size_t j = 0; j < hidden.size(); ++j) {
    pooled.push_back(attention_pool(hidden[j], p.attn[1][j]));
  }
  const Eigen::VectorXd fused = fuse(pooled, p.fusion_logits, p.fusion_scale);
  const Eigen::VectorXd expected = fused / fused.norm();
  ForwardTrace trace;
  const auto out = encode(ids, m, p, &trace);
  EXPECT_TRUE(out.values.isApprox(expected, 1e-14));
  EXPECT_EQ(trace.hidden.size(), 3u);
  EXPECT_EQ(trace.output, out.values);
}

TEST(Encode, QueryAndCodeUseDifferentAttention) {
  auto p = oracle::random_params(config(20, 6, 1), 8);
  p.align[Modality::code(Language::Go).index()] = p.align[Modality::query().index()];
  const std::vector<TokenId> ids = {4, 11, 17};
  const auto q = encode(ids, Modality::query(), p);
  const auto c = encode(ids, Modality::code(Language::Go), p);
  EXPECT_FALSE(q.values.isApprox(c.values, 1e-9));
  p.attn[1] = p.attn[0];
  EXPECT_TRUE(encode(ids, Modality::code(Language::Go), p).values.isApprox(q.values, 1e-15));
}

TEST(Encode, DegenerateInputsThrow) {
  auto p = oracle::random_params(config(20, 4, 1), 1);
  const std::vector<TokenId> pads = {BpeModel::kPad, BpeModel::kPad};
  EXPECT_THROW(encode(pads, Modality::query(), p), DomainError);
  EXPECT_THROW(encode({}, Modality::query(), p), DomainError);
  p.fusion_scale = 0.0;
  const std::vector<TokenId> ids = {5};
  EXPECT_THROW(encode(ids, Modality::query(), p), DomainError);
}

TEST(Encode, ScaleInvariance) {
  auto p = oracle::random_params(config(20, 5, 1), 3);
  const std::vector<TokenId> ids = {5, 6, 7};
  const auto a = encode(ids, Modality::query(), p);
  p.fusion_scale *= 37.5;
  const auto b = encode(ids, Modality::query(), p);
  EXPECT_TRUE(a.values.isApprox(b.values, 1e-14));
}

TEST(EncoderProperties, RandomSamples) {
  std::mt19937_64 rng(21);
  for (int s = 0; s < 200; ++s) {
    const std::size_t d = 2 + rng() % 7;
    const std::size_t layers = rng() % 3;
    const auto p = oracle::random_params(config(25, d, layers), rng());
    auto ids = oracle::random_ids(25, 1, 12, rng);
    const auto m = Modality::code(kAllLanguages[rng() % kNumLanguages]);
    ForwardTrace trace;
    const auto out = encode(ids, m, p, &trace);
    EXPECT_NEAR(out.values.norm(), 1.0, 1e-6);
    for (const auto& a : trace.attention) {
      EXPECT_NEAR(a.sum(), 1.0, 1e-6);
      EXPECT_GE(a.minCoeff(), 0.0);
    }
    // Trailing PAD is masked out.
    ids.insert(ids.end(), 1 + rng() % 5, BpeModel::kPad);
    const auto padded = encode(ids, m, p);
    EXPECT_LE((padded.values - out.values).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(EncoderProperties, PermutationInvarianceWithoutLayers) {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 50; ++s) {
    const auto p = oracle::random_params(config(25, 6, 0), rng());
    auto ids = oracle::random_ids(25, 2, 10, rng);
    const auto a = encode(ids, Modality::query(), p);
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto b = encode(ids, Modality::query(), p);
    EXPECT_EQ(a.values, b.values);
  }
}

TEST(EncoderProperties, ConvexHullWithoutLayers) {
  auto p = oracle::random_params(config(25, 3, 0), 17);
  p.fusion_scale = 1.0;
  const std::vector<TokenId> ids = {3, 8, 13};
  ForwardTrace trace;
  encode(ids, Modality::query(), p, &trace);
  const Eigen::VectorXd rebuilt = trace.hidden[0] * trace.attention[0];
  EXPECT_TRUE(trace.fused.isApprox(rebuilt, 1e-14));
  EXPECT_NEAR(trace.attention[0].sum(), 1.0, 1e-15);
}

TEST(EncoderProperties, SoftmaxShiftInvariance) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Random(3, 4);
  // Adding a constant row (w^T h shifts uniformly) when w has a unit last
  // component.
  Eigen::VectorXd w(3);
  w << 0.4, -0.3, 1.0;
  Eigen::MatrixXd shifted = h;
  shifted.row(2).array() += 2.5;
  Eigen::VectorXd a1, a2;
  attention_pool(h, w, {}, &a1);
  attention_pool(shifted, w, {}, &a2);
  EXPECT_LE((a1 - a2).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(CosineSim, Examples) {
  EmbeddingVector a{Eigen::Vector2d(1, 0), true};
  EmbeddingVector b{Eigen::Vector2d(0, 1), true};
  EmbeddingVector c{Eigen::Vector2d(-1, 0), true};
  EXPECT_DOUBLE_EQ(cosine_sim(a, a), 1.0);
  EXPECT_DOUBLE_EQ(cosine_sim(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine_sim(a, c), -1.0);
}

TEST(CosineSim, RejectsUnnormalized) {
  EmbeddingVector a{Eigen::Vector2d(1, 0), true};
  EmbeddingVector flag_missing{Eigen::Vector2d(1, 0), false};
  EmbeddingVector wrong_norm{Eigen::Vector2d(2, 0), true};
  EXPECT_THROW(cosine_sim(a, flag_missing), ContractError);
  EXPECT_THROW(cosine_sim(wrong_norm, a), ContractError);
}

TEST(EncoderParams, InitializationMatchesDocumentedRanges) {
  const auto p = EncoderParams::initialize(config(50, 8, 2), 1);
  EXPECT_LE(p.embed.cwiseAbs().maxCoeff(), 0.05);
  EXPECT_EQ(p.align[Modality::query().index()], RowMatrix::Identity(8, 8));
  const RowMatrix noise = p.align[0] - RowMatrix::Identity(8, 8);
  EXPECT_LE(noise.cwiseAbs().maxCoeff(), 0.01);
  EXPECT_GT(noise.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE(p.mlp[0].weight.cwiseAbs().maxCoeff(), std::sqrt(3.0 / 8.0));
  EXPECT_TRUE(p.mlp[0].bias.isZero(0.0));
  EXPECT_TRUE(p.fusion_logits.isZero(0.0));
  EXPECT_EQ(p.fusion_scale, 1.0);
  for (const auto& t : p.tensors())
    for (double x : t) EXPECT_EQ(static_cast<double>(static_cast<float>(x)), x);
  EXPECT_EQ(p.parameter_count(), 50u * 8 + 7 * 64 + 2 * (64 + 8) + 2 * 3 * 8 + 3 + 1);
}

}  // namespace
}  // namespace scs
