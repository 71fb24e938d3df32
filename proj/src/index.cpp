// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_set>

#include "scs/checkpoint.hpp"
#include "scs/error.hpp"

namespace scs {

namespace {
constexpr std::string_view kMagic = "SCSI v1\n";
constexpr std::size_t kBlockRows = 4;
}  // namespace

EmbeddingIndex::EmbeddingIndex(std::size_t dim, std::vector<float> vectors,
                               std::vector<IndexEntry> entries, std::uint64_t fingerprint)
    : dim_(dim),
      vectors_(std::move(vectors)),
      entries_(std::move(entries)),
      fingerprint_(fingerprint) {}

void EmbeddingIndex::validate() const {
  if (vectors_.size() != entries_.size() * dim_) {
    throw CorruptionError("index vector storage does not match N x d");
  }
  std::unordered_set<std::string_view> ids;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!ids.insert(entries_[i].id).second) {
      throw CorruptionError("index id '" + entries_[i].id + "' is not unique");
    }
    double sq = 0.0;
    for (float x : row(i)) sq += double{x} * double{x};
    if (std::abs(std::sqrt(sq) - 1.0) > 1e-5) {
      throw CorruptionError("index row " + std::to_string(i) + " is not unit length");
    }
  }
}

EmbeddingIndex build_index(const CorpusSplit& corpus, const EncoderParams& params,
                           const BpeModel& bpe, const CorpusOptions& caps, BuildReport* report) {
  if (corpus.entries.empty()) throw ParameterError("cannot index an empty corpus");
  BuildReport local;
  BuildReport& rep = report ? *report : local;
  rep = BuildReport{};

  const std::size_t d = params.config.dim;
  std::vector<float> vectors;
  vectors.reserve(corpus.entries.size() * d);
  std::vector<IndexEntry> entries;
  std::unordered_set<std::string_view> seen;
  for (const auto& e : corpus.entries) {
    if (!seen.insert(e.id).second) throw ParameterError("duplicate snippet id '" + e.id + "'");
    const auto ids = tokenize_surface(e.code_tokens, bpe, caps.max_code_tokens);
    EmbeddingVector v;
    try {
      v = encode(ids, Modality::code(e.language), params);
    } catch (const DomainError&) {
      rep.skipped.push_back(e.id);
      continue;
    }
    for (Eigen::Index i = 0; i < v.values.size(); ++i) {
      vectors.push_back(static_cast<float>(v.values[i]));
    }
    entries.push_back({e.id, e.language, {}});
  }
  rep.indexed = entries.size();
  return EmbeddingIndex(d, std::move(vectors), std::move(entries), model_fingerprint(params));
}

std::vector<double> score_all(const EmbeddingIndex& index, const Eigen::VectorXd& query) {
  const std::size_t n = index.size();
  const std::size_t d = index.dim();
  if (static_cast<std::size_t>(query.size()) != d) {
    throw ContractError("query dimension " + std::to_string(query.size()) +
                        " does not match index dimension " + std::to_string(d));
  }
  std::vector<double> scores(n);
  const float* base = index.vectors().data();
  const double* q = query.data();
  std::size_t r = 0;
  for (; r + kBlockRows <= n; r += kBlockRows) {
    const float* r0 = base + r * d;
    const float* r1 = r0 + d;
    const float* r2 = r1 + d;
    const float* r3 = r2 + d;
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const double qk = q[k];
      a0 += double{r0[k]} * qk;
      a1 += double{r1[k]} * qk;
      a2 += double{r2[k]} * qk;
      a3 += double{r3[k]} * qk;
    }
    scores[r] = a0;
    scores[r + 1] = a1;
    scores[r + 2] = a2;
    scores[r + 3] = a3;
  }
  for (; r < n; ++r) {
    const float* row = base + r * d;
    double acc = 0;
    for (std::size_t k = 0; k < d; ++k) acc += double{row[k]} * q[k];
    scores[r] = acc;
  }
  return scores;
}

std::vector<RankedResult> scan_topk(const EmbeddingIndex& index, const Eigen::VectorXd& query,
                                    std::size_t k) {
  if (k == 0) throw ParameterError("k must be at least 1");
  const auto scores = score_all(index, query);
  const auto& entries = index.entries();
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k, order.size());
  auto before = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return entries[a].id < entries[b].id;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end(), before);
  std::vector<RankedResult> out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    out.push_back({entries[order[r]].id, scores[order[r]], r + 1});
  }
  return out;
}

Searcher::Searcher(const EmbeddingIndex& index, const EncoderParams& params,
                   const BpeModel& bpe, std::size_t query_cap)
    : index_(index), params_(params), bpe_(bpe), query_cap_(query_cap) {
  if (model_fingerprint(params) != index.fingerprint()) {
    throw StalenessError("index was built with a different model checkpoint");
  }
  if (params.config.dim != index.dim()) {
    throw StalenessError("index dimension does not match the model");
  }
}

Eigen::VectorXd Searcher::embed_query(std::string_view text) const {
  const auto ids = tokenize_query(text, bpe_, query_cap_);
  if (ids.empty()) throw InputError("query is empty after tokenization");
  return encode(ids, Modality::query(), params_).values;
}

std::vector<RankedResult> Searcher::search(std::string_view text, std::size_t k) const {
  if (k == 0) throw ParameterError("k must be at least 1");
  return scan_topk(index_, embed_query(text), k);
}

std::vector<RankedResult> query_topk(std::string_view query_text, const EmbeddingIndex& index,
                                     const EncoderParams& params, const BpeModel& bpe,
                                     std::size_t k, std::size_t query_cap) {
  if (k == 0) throw ParameterError("k must be at least 1");
  return Searcher(index, params, bpe, query_cap).search(query_text, k);
}

Bytes index_bytes(const EmbeddingIndex& index) {
  ByteWriter w;
  w.raw(kMagic);
  w.u64(index.size());
  w.u32(static_cast<std::uint32_t>(index.dim()));
  for (float x : index.vectors()) w.f32(x);
  for (const auto& e : index.entries()) {
    w.str(e.id);
    w.u8(static_cast<std::uint8_t>(e.language));
    w.str(e.location);
  }
  w.u64(index.fingerprint());
  const auto crc = crc32_of(w.bytes());
  w.u32(crc);
  return w.take();
}

EmbeddingIndex parse_index(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("not an embedding index (bad magic)");
  }
  if (bytes.size() < kMagic.size() + 8 + 4 + 8 + 4) throw CorruptionError("index truncated");
  const auto body = bytes.first(bytes.size() - 4);
  ByteReader trailer(bytes.subspan(bytes.size() - 4));
  if (trailer.u32() != crc32_of(body)) throw CorruptionError("index checksum mismatch");

  ByteReader r(body.subspan(kMagic.size()));
  const std::uint64_t n = r.u64();
  const std::uint32_t d = r.u32();
  if (d == 0 || n > r.remaining() / (std::uint64_t{d} * 4)) {
    throw CorruptionError("index dims exceed file size");
  }
  std::vector<float> vectors(static_cast<std::size_t>(n * d));
  for (auto& x : vectors) x = r.f32();
  std::vector<IndexEntry> entries(static_cast<std::size_t>(n));
  for (auto& e : entries) {
    e.id = r.str();
    const auto lang = r.u8();
    if (lang >= kNumLanguages) throw CorruptionError("index has an invalid language byte");
    e.language = static_cast<Language>(lang);
    e.location = r.str();
  }
  const std::uint64_t fingerprint = r.u64();
  if (r.remaining() != 0) throw CorruptionError("trailing bytes in index");
  EmbeddingIndex index(d, std::move(vectors), std::move(entries), fingerprint);
  index.validate();
  return index;
}

void save_index(const EmbeddingIndex& index, const std::filesystem::path& path) {
  atomic_write(path, index_bytes(index));
}

EmbeddingIndex load_index(const std::filesystem::path& path) {
  return parse_index(read_file_bytes(path));
}

}  // namespace scs
