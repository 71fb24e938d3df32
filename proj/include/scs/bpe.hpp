// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace scs {

using TokenId = std::int32_t;

/// Byte-pair-encoding model: ordered merges plus a bijective subword
/// vocabulary. Ids 0..2 are reserved (padding, unknown, word boundary);
/// then the character alphabet in byte order; then merge results in merge
/// order. Immutable once built, so encode/decode are safe from any thread.
class BpeModel {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kBoundary = 2;
  static constexpr std::size_t kNumSpecials = 3;

  using Merge = std::pair<std::string, std::string>;

  BpeModel() = default;

  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<Merge>& merges() const { return merges_; }
  const std::string& subword(TokenId id) const;
  std::optional<TokenId> lookup(std::string_view subword) const;

  /// Character-initializes each whitespace-separated word of `token` and
  /// applies merges lowest-rank first until none applies. Characters
  /// outside the alphabet become kUnk; words are separated by kBoundary.
  std::vector<TokenId> encode(std::string_view token) const;
  /// Throws DomainError on ids outside the vocabulary.
  std::string decode(std::span<const TokenId> ids) const;

  /// Text form: "BPE v1 <vocab_size>", one "<left> <right>" line per merge,
  /// then one "<id> <subword>" line per vocabulary entry. LF endings.
  std::string serialize() const;
  static BpeModel parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static BpeModel load(const std::filesystem::path& path);

  bool operator==(const BpeModel& other) const {
    return merges_ == other.merges_ && vocab_ == other.vocab_;
  }

 private:
  friend class BpeBuilder;

  static void check_replay(const BpeModel& model);
  TokenId add_subword(std::string s);
  void add_merge(Merge merge);
  void apply_merges(std::vector<TokenId>& symbols) const;

  std::vector<Merge> merges_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TokenId> ids_;
  // (left id, right id) -> (rank, merged id)
  std::map<std::pair<TokenId, TokenId>, std::pair<std::size_t, TokenId>> rank_;
};

/// Splits UTF-8 text into code points; an invalid byte stands alone.
std::vector<std::string_view> utf8_chars(std::string_view s);

/// Greedy merge training. Each step merges the most frequent adjacent pair
/// (ties: smallest (left, right) by byte order), counting pairs only inside
/// words. Stops when the vocabulary reaches `target_vocab_size` or no pair
/// occurs at least twice.
BpeModel bpe_train(std::span<const std::string> token_stream, std::size_t target_vocab_size);
BpeModel bpe_train(const std::map<std::string, std::size_t>& token_counts,
                   std::size_t target_vocab_size);

inline std::vector<TokenId> bpe_encode(std::string_view token, const BpeModel& model) {
  return model.encode(token);
}
inline std::string bpe_decode(std::span<const TokenId> ids, const BpeModel& model) {
  return model.decode(ids);
}

/// Normalizes surface tokens, encodes each, concatenates and truncates to
/// `cap` ids. Word boundaries are not emitted (the encoder is order-free).
std::vector<TokenId> tokenize_surface(std::span<const std::string> surface_tokens,
                                      const BpeModel& model, std::size_t cap);
/// Raw natural-language query -> ids, via lex_text.
std::vector<TokenId> tokenize_query(std::string_view text, const BpeModel& model,
                                    std::size_t cap);

}  // namespace scs
