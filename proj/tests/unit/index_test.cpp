// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include <fstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scs/binary_io.hpp"
#include "scs/checkpoint.hpp"
#include "scs/error.hpp"
#include "scs/index.hpp"
#include "scs/lexer.hpp"
#include "test_util.hpp"

namespace scs {
namespace {

struct Model {
  BpeModel bpe;
  EncoderParams params;
};

Model small_model(const CorpusSplit& corpus, std::uint64_t seed, std::size_t dim = 8) {
  std::vector<std::string> stream;
  for (const auto& e : corpus.entries) {
    for (auto& t : normalize_surface_tokens(e.doc_tokens)) stream.push_back(t);
    for (auto& t : normalize_surface_tokens(e.code_tokens)) stream.push_back(t);
  }
  Model m{bpe_train(stream, 120), {}};
  m.params = oracle::random_params({m.bpe.vocab_size(), dim, 1, Activation::Tanh}, seed);
  return m;
}

EmbeddingIndex tie_index() {
  std::vector<float> v = {1, 0, 0, 1, 1, 0, 1, 0};
  return EmbeddingIndex(2, v,
                        {{"b", Language::Go, ""}, {"c", Language::Go, ""},
                         {"a", Language::Go, "x.go:3"}, {"d", Language::Go, ""}},
                        42);
}

TEST(BuildIndex, SingleEntryRowEqualsEncoding) {
  auto corpus = oracle::synthetic_pairs(1, 1, Partition::Test);
  const auto m = small_model(corpus, 1);
  BuildReport report;
  const auto index = build_index(corpus, m.params, m.bpe, {}, &report);
  ASSERT_EQ(index.size(), 1u);
  EXPECT_EQ(report.indexed, 1u);
  const auto ids = tokenize_surface(corpus.entries[0].code_tokens, m.bpe, 256);
  const auto e = encode(ids, Modality::code(Language::Python), m.params);
  for (std::size_t j = 0; j < index.dim(); ++j) {
    EXPECT_EQ(index.row(0)[j], static_cast<float>(e.values(static_cast<Eigen::Index>(j))));
  }
  EXPECT_EQ(index.fingerprint(), model_fingerprint(m.params));
}

TEST(BuildIndex, DuplicateCodeGivesIdenticalRows) {
  auto corpus = oracle::synthetic_pairs(2, 2, Partition::Test);
  corpus.entries[1].code_tokens = corpus.entries[0].code_tokens;
  const auto m = small_model(corpus, 2);
  const auto index = build_index(corpus, m.params, m.bpe);
  ASSERT_EQ(index.size(), 2u);
  EXPECT_TRUE(std::equal(index.row(0).begin(), index.row(0).end(), index.row(1).begin()));
  EXPECT_NE(index.entries()[0].id, index.entries()[1].id);
}

TEST(BuildIndex, RowsAreUnitNorm) {
  const auto corpus = oracle::synthetic_pairs(100, 3, Partition::Test);
  const auto m = small_model(corpus, 3);
  const auto index = build_index(corpus, m.params, m.bpe);
  ASSERT_EQ(index.size(), 100u);
  for (std::size_t i = 0; i < index.size(); ++i) {
    double s = 0;
    for (float x : index.row(i)) s += double{x} * x;
    EXPECT_NEAR(std::sqrt(s), 1.0, 1e-5);
  }
  index.validate();
}

TEST(BuildIndex, SkipsUnencodableEntries) {
  auto corpus = oracle::synthetic_pairs(3, 4, Partition::Test);
  const auto m = small_model(corpus, 4);
  corpus.entries[1].code_tokens = {"   "};
  BuildReport report;
  const auto index = build_index(corpus, m.params, m.bpe, {}, &report);
  EXPECT_EQ(index.size(), 2u);
  EXPECT_EQ(report.skipped, std::vector<std::string>{corpus.entries[1].id});
}

TEST(BuildIndex, EmptyCorpusIsAParameterError) {
  const auto corpus = oracle::synthetic_pairs(3, 4, Partition::Test);
  const auto m = small_model(corpus, 4);
  EXPECT_THROW(build_index(CorpusSplit{}, m.params, m.bpe), ParameterError);
}

TEST(ScanTopk, ReturnsEverythingSortedWhenKExceedsN) {
  const auto index = tie_index();
  const auto res = scan_topk(index, Eigen::Vector2d(1, 0), 10);
  ASSERT_EQ(res.size(), 4u);
  EXPECT_EQ(res[0].id, "a");
  EXPECT_EQ(res[1].id, "b");
  EXPECT_EQ(res[2].id, "d");
  EXPECT_EQ(res[3].id, "c");
  for (std::size_t r = 0; r < res.size(); ++r) EXPECT_EQ(res[r].rank, r + 1);
  EXPECT_EQ(res[0].score, 1.0);
  EXPECT_EQ(res[3].score, 0.0);
}

TEST(ScanTopk, TiesBreakByAscendingId) {
  const auto res = scan_topk(tie_index(), Eigen::Vector2d(1, 0), 2);
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(res[0].id, "a");
  EXPECT_EQ(res[1].id, "b");
  EXPECT_THROW(scan_topk(tie_index(), Eigen::Vector2d(1, 0), 0), ParameterError);
  EXPECT_THROW(scan_topk(tie_index(), Eigen::Vector3d(1, 0, 0), 1), ContractError);
}

TEST(ScanTopk, MatchesNaiveScorer) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 1 + rng() % 300, d = 1 + rng() % 20;
    std::normal_distribution<double> g;
    std::vector<float> v(n * d);
    std::vector<IndexEntry> meta;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < d; ++j) s += (v[i * d + j] = static_cast<float>(g(rng))) * v[i * d + j];
      for (std::size_t j = 0; j < d; ++j) v[i * d + j] = static_cast<float>(v[i * d + j] / std::sqrt(s));
      meta.push_back({"id" + std::to_string(rng() % 100000) + "_" + std::to_string(i), Language::Go, ""});
    }
    EmbeddingIndex index(d, v, meta, 1);
    Eigen::VectorXd q(d);
    for (auto& x : q) x = g(rng);
    q.normalize();
    const std::vector<double> qv(q.data(), q.data() + d);
    EXPECT_EQ(scan_topk(index, q, n), oracle::naive_topk(index, qv, n));
    EXPECT_EQ(scan_topk(index, q, 7), oracle::naive_topk(index, qv, 7));
  }
}

TEST(QueryTopk, FindsPairedCodeAfterOverfitting) {
  const auto corpus = oracle::synthetic_pairs(12, 6, Partition::Train);
  auto m = small_model(corpus, 6, 16);
  m.params = EncoderParams::initialize(m.params.config, 6);
  const auto pairs = prepare_pairs(corpus, m.bpe);
  TrainConfig tc;
  tc.batch_size = 12;
  tc.epochs = 150;
  tc.learning_rate = 0.02;
  m.params = train(tc, pairs, m.params).params;
  const auto index = build_index(corpus, m.params, m.bpe);
  std::size_t hits = 0;
  for (const auto& e : corpus.entries) {
    std::string text;
    for (const auto& w : e.doc_tokens) text += w + " ";
    const auto res = query_topk(text, index, m.params, m.bpe, 3);
    hits += res.at(0).id == e.id;
    for (std::size_t r = 1; r < res.size(); ++r) EXPECT_GE(res[r - 1].score, res[r].score);
  }
  EXPECT_GE(hits, 11u);
}

TEST(QueryTopk, StaleIndexAndEmptyQuery) {
  const auto corpus = oracle::synthetic_pairs(5, 7, Partition::Test);
  const auto m = small_model(corpus, 7);
  const auto index = build_index(corpus, m.params, m.bpe);
  auto other = m.params;
  other.embed(4, 0) += 0.25;
  EXPECT_THROW(query_topk("bafa", index, other, m.bpe, 3), StalenessError);
  EXPECT_THROW(query_topk("   ", index, m.params, m.bpe, 3), InputError);
  EXPECT_THROW(query_topk("bafa", index, m.params, m.bpe, 0), ParameterError);
  const Searcher s(index, m.params, m.bpe);
  EXPECT_EQ(s.search("bafa dede", 5), s.search("bafa dede", 5));
  EXPECT_EQ(s.search("bafa dede", 5), query_topk("bafa dede", index, m.params, m.bpe, 5));
}

TEST(IndexFile, RoundTrip) {
  const auto corpus = oracle::synthetic_pairs(20, 8, Partition::Test);
  const auto m = small_model(corpus, 8);
  const auto index = build_index(corpus, m.params, m.bpe);
  testing::TempDir dir;
  save_index(index, dir / "idx.bin");
  const auto back = load_index(dir / "idx.bin");
  EXPECT_EQ(back, index);
  EXPECT_EQ(index_bytes(back), read_file_bytes(dir / "idx.bin"));
  const auto ties = tie_index();
  EXPECT_EQ(parse_index(index_bytes(ties)), ties);
  EXPECT_EQ(parse_index(index_bytes(ties)).entries()[2].location, "x.go:3");
}

TEST(IndexFile, RejectsDamage) {
  const auto bytes = index_bytes(tie_index());
  // Every truncation is refused.
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    const std::span<const std::uint8_t> prefix(bytes.data(), n);
    EXPECT_ANY_THROW(parse_index(prefix)) << n;
  }
  EXPECT_THROW(parse_index(std::span(bytes.data(), bytes.size() - 3)), CorruptionError);
  auto flipped = bytes;
  flipped[20] ^= 0x40;
  EXPECT_THROW(parse_index(flipped), CorruptionError);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(parse_index(magic), FormatError);
  EXPECT_THROW(load_index("/nonexistent/idx.bin"), IoError);
}

}  // namespace
}  // namespace scs
