// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scs/binary_io.hpp"
#include "scs/bpe.hpp"
#include "scs/corpus.hpp"
#include "scs/encoder.hpp"

namespace scs {

struct IndexEntry {
  std::string id;
  Language language = Language::Python;
  std::string location;  // optional, may be empty

  bool operator==(const IndexEntry&) const = default;
};

/// Unit-normalized code embeddings (row-major float32) with per-row
/// metadata and the fingerprint of the model that produced them.
class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;
  EmbeddingIndex(std::size_t dim, std::vector<float> vectors, std::vector<IndexEntry> entries,
                 std::uint64_t fingerprint);

  std::size_t size() const { return entries_.size(); }
  std::size_t dim() const { return dim_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  const std::vector<float>& vectors() const { return vectors_; }
  std::span<const float> row(std::size_t i) const {
    return std::span(vectors_).subspan(i * dim_, dim_);
  }

  /// Throws CorruptionError when a row is not unit length (1e-5), ids repeat
  /// or the shapes disagree.
  void validate() const;

  bool operator==(const EmbeddingIndex&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<float> vectors_;
  std::vector<IndexEntry> entries_;
  std::uint64_t fingerprint_ = 0;
};

struct BuildReport {
  std::size_t indexed = 0;
  std::vector<std::string> skipped;  // ids whose encoding failed
};

/// Encodes every entry's code side. Entries that tokenize to nothing or fail
/// to encode are skipped and listed in `report`. Throws ParameterError on an
/// empty corpus.
EmbeddingIndex build_index(const CorpusSplit& corpus, const EncoderParams& params,
                           const BpeModel& bpe, const CorpusOptions& caps = {},
                           BuildReport* report = nullptr);

struct RankedResult {
  std::string id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based

  bool operator==(const RankedResult&) const = default;
};

/// Cosine score of every row against a unit query vector, in row order.
/// Blocked four-rows-at-a-time kernel with double accumulation.
std::vector<double> score_all(const EmbeddingIndex& index, const Eigen::VectorXd& query);

/// Exact top-k by (score desc, id asc); returns min(k, N) results.
std::vector<RankedResult> scan_topk(const EmbeddingIndex& index, const Eigen::VectorXd& query,
                                    std::size_t k);

/// Encodes raw query text and scans the index. Throws StalenessError when
/// `params` is not the model the index was built with, InputError when the
/// query tokenizes to nothing, ParameterError for k == 0.
std::vector<RankedResult> query_topk(std::string_view query_text, const EmbeddingIndex& index,
                                     const EncoderParams& params, const BpeModel& bpe,
                                     std::size_t k, std::size_t query_cap = 64);

/// Binds an index to a model once (fingerprint checked at construction) for
/// repeated queries.
class Searcher {
 public:
  Searcher(const EmbeddingIndex& index, const EncoderParams& params, const BpeModel& bpe,
           std::size_t query_cap = 64);

  Eigen::VectorXd embed_query(std::string_view text) const;
  std::vector<RankedResult> search(std::string_view text, std::size_t k) const;

 private:
  const EmbeddingIndex& index_;
  const EncoderParams& params_;
  const BpeModel& bpe_;
  std::size_t query_cap_;
};

// File layout (little-endian): "SCSI v1\n", u64 N, u32 d, N*d f32 rows,
// N * (u32 len + id bytes, u8 language, u32 len + location bytes),
// u64 model fingerprint, u32 crc32 of every preceding byte.
Bytes index_bytes(const EmbeddingIndex& index);
EmbeddingIndex parse_index(std::span<const std::uint8_t> bytes);
void save_index(const EmbeddingIndex& index, const std::filesystem::path& path);
EmbeddingIndex load_index(const std::filesystem::path& path);

}  // namespace scs
