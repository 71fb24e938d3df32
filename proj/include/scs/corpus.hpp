// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scs/language.hpp"

namespace scs {

/// One docstring/function pair. `doc_tokens` plays the role of the query
/// during training.
struct CorpusEntry {
  std::string id;
  Language language = Language::Python;
  std::vector<std::string> doc_tokens;
  std::vector<std::string> code_tokens;
  std::optional<std::string> raw_doc;
  std::optional<std::string> raw_code;

  bool operator==(const CorpusEntry&) const = default;
};

enum class Partition : std::uint8_t { Train = 0, Valid, Test };
inline constexpr std::size_t kNumPartitions = 3;

std::string_view partition_name(Partition p);
std::optional<Partition> parse_partition(std::string_view name);

struct CorpusSplit {
  Partition partition = Partition::Train;
  std::vector<CorpusEntry> entries;
};

struct CorpusOptions {
  std::size_t max_doc_tokens = 64;
  std::size_t max_code_tokens = 256;
  /// load_split fails when rejected / non-blank lines exceeds this.
  double max_invalid_fraction = 0.10;
};

/// Parses and validates one JSONL record. Unknown fields are ignored.
/// Throws ParseError (with byte offset), SchemaError (naming the field) or
/// DomainError (unsupported language).
CorpusEntry parse_corpus_line(std::string_view line, const CorpusOptions& options = {});

/// Inverse of parse_corpus_line for untruncated entries; one line, no LF.
std::string serialize_corpus_entry(const CorpusEntry& entry);

/// First paragraph of a docstring with inline markup stripped, split on
/// whitespace.
std::vector<std::string> summarize_docstring(std::string_view raw_doc);

struct RejectedLine {
  std::size_t line_number = 0;  // 1-based
  std::string message;
};

struct LoadReport {
  std::size_t lines = 0;  // non-blank lines seen
  std::size_t accepted = 0;
  std::vector<RejectedLine> rejected;
  std::vector<std::string> warnings;
};

/// Loads every valid record in file order. Invalid lines (including ids
/// repeated within the file) are counted in `report`, never silently dropped.
CorpusSplit load_split(const std::filesystem::path& path, Partition partition,
                       const CorpusOptions& options = {}, LoadReport* report = nullptr);

/// Counts per (language, partition).
class SplitStats {
 public:
  std::size_t count(Language lang, Partition part) const {
    return counts_[static_cast<std::size_t>(lang)][static_cast<std::size_t>(part)];
  }
  std::size_t partition_total(Partition part) const;
  std::size_t total() const;
  void add(Language lang, Partition part, std::size_t n = 1) {
    counts_[static_cast<std::size_t>(lang)][static_cast<std::size_t>(part)] += n;
  }
  /// Table laid out like the CodeSearchNet statistics table.
  std::string to_table() const;

 private:
  std::array<std::array<std::size_t, kNumPartitions>, kNumLanguages> counts_{};
};

SplitStats split_stats(std::span<const CorpusSplit> splits);

/// Throws DomainError naming the first id that appears in two partitions.
void check_partition_disjoint(std::span<const CorpusSplit> splits);

}  // namespace scs
