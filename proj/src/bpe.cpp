// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/bpe.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_set>

#include "scs/binary_io.hpp"
#include "scs/error.hpp"
#include "scs/lexer.hpp"

namespace scs {

namespace {

// U+2581, reserved for special-token strings; never part of the alphabet.
constexpr std::string_view kMarker = "\xE2\x96\x81";
constexpr std::string_view kReplacement = "\xEF\xBF\xBD";

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

std::vector<std::string_view> split_words(std::string_view token) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < token.size()) {
    while (i < token.size() && is_ascii_space(token[i])) ++i;
    std::size_t j = i;
    while (j < token.size() && !is_ascii_space(token[j])) ++j;
    if (j > i) words.push_back(token.substr(i, j - i));
    i = j;
  }
  return words;
}

std::vector<std::string> special_strings() {
  return {std::string(kMarker) + "PAD", std::string(kMarker) + "UNK", std::string(kMarker)};
}

}  // namespace

std::vector<std::string_view> utf8_chars(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (b >= 0xF0 && b < 0xF8) len = 4;
    else if (b >= 0xE0) len = 3;
    else if (b >= 0xC0) len = 2;
    if (len > 1) {
      bool ok = i + len <= s.size();
      for (std::size_t k = 1; ok && k < len; ++k) {
        ok = (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
      }
      if (!ok) len = 1;
    }
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

const std::string& BpeModel::subword(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size()) {
    throw DomainError("token id " + std::to_string(id) + " outside vocabulary of size " +
                      std::to_string(vocab_.size()));
  }
  return vocab_[static_cast<std::size_t>(id)];
}

std::optional<TokenId> BpeModel::lookup(std::string_view s) const {
  auto it = ids_.find(std::string(s));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TokenId BpeModel::add_subword(std::string s) {
  auto it = ids_.find(s);
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<TokenId>(vocab_.size());
  ids_.emplace(s, id);
  vocab_.push_back(std::move(s));
  return id;
}

void BpeModel::add_merge(Merge merge) {
  const TokenId l = ids_.at(merge.first);
  const TokenId r = ids_.at(merge.second);
  const TokenId m = add_subword(merge.first + merge.second);
  rank_.emplace(std::pair{l, r}, std::pair{merges_.size(), m});
  merges_.push_back(std::move(merge));
}

void BpeModel::apply_merges(std::vector<TokenId>& symbols) const {
  while (symbols.size() > 1) {
    std::size_t best_rank = merges_.size();
    std::pair<TokenId, TokenId> best{};
    TokenId merged = kUnk;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = rank_.find({symbols[i], symbols[i + 1]});
      if (it != rank_.end() && it->second.first < best_rank) {
        best_rank = it->second.first;
        best = it->first;
        merged = it->second.second;
      }
    }
    if (best_rank == merges_.size()) break;
    std::vector<TokenId> next;
    next.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == best.first && symbols[i + 1] == best.second) {
        next.push_back(merged);
        i += 2;
      } else {
        next.push_back(symbols[i++]);
      }
    }
    symbols.swap(next);
  }
}

std::vector<TokenId> BpeModel::encode(std::string_view token) const {
  std::vector<TokenId> out;
  std::vector<TokenId> symbols;
  for (auto word : split_words(token)) {
    if (!out.empty()) out.push_back(kBoundary);
    symbols.clear();
    for (auto ch : utf8_chars(word)) {
      auto it = ids_.find(std::string(ch));
      const bool special = it != ids_.end() && it->second < static_cast<TokenId>(kNumSpecials);
      symbols.push_back(it == ids_.end() || special ? kUnk : it->second);
    }
    apply_merges(symbols);
    out.insert(out.end(), symbols.begin(), symbols.end());
  }
  return out;
}

std::string BpeModel::decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    const auto& s = subword(id);
    switch (id) {
      case kPad: break;
      case kUnk: out += kReplacement; break;
      case kBoundary: out += ' '; break;
      default: out += s;
    }
  }
  return out;
}

std::string BpeModel::serialize() const {
  std::string out = "BPE v1 " + std::to_string(vocab_.size()) + "\n";
  for (const auto& [l, r] : merges_) {
    out += l;
    out += ' ';
    out += r;
    out += '\n';
  }
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    out += std::to_string(i);
    out += ' ';
    out += vocab_[i];
    out += '\n';
  }
  return out;
}

// The vocabulary must be exactly what training would have produced from the
// merges: an ascending single-character alphabet, then each new merge result
// in merge order, every merge built from subwords that already existed.
void BpeModel::check_replay(const BpeModel& model) {
  const auto& vocab = model.vocab_;
  std::size_t next = kNumSpecials;
  while (next < vocab.size() && utf8_chars(vocab[next]).size() == 1) {
    if (next > kNumSpecials && !(vocab[next - 1] < vocab[next])) {
      throw FormatError("BPE model: alphabet is not in byte order");
    }
    ++next;
  }
  std::unordered_set<std::string> known(vocab.begin(), vocab.begin() + static_cast<std::ptrdiff_t>(next));
  for (const auto& [l, r] : model.merges_) {
    if (!known.count(l) || !known.count(r)) {
      throw FormatError("BPE model: merge '" + l + " " + r + "' uses a later subword");
    }
    std::string merged = l + r;
    if (known.count(merged)) continue;
    if (next >= vocab.size() || vocab[next] != merged) {
      throw FormatError("BPE model: vocabulary does not follow the merges at id " +
                        std::to_string(next));
    }
    known.insert(std::move(merged));
    ++next;
  }
  if (next != vocab.size()) throw FormatError("BPE model: vocabulary has entries no merge produced");
}

BpeModel BpeModel::parse(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) throw FormatError("BPE model: missing final newline");
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  constexpr std::string_view kHeader = "BPE v1 ";
  if (lines.empty() || lines[0].substr(0, kHeader.size()) != kHeader) {
    throw FormatError("BPE model: bad header");
  }
  std::size_t vocab_size = 0;
  const auto num = lines[0].substr(kHeader.size());
  auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), vocab_size);
  if (ec != std::errc{} || p != num.data() + num.size() || vocab_size < kNumSpecials ||
      lines.size() < 1 + vocab_size) {
    throw FormatError("BPE model: bad vocabulary size");
  }
  const std::size_t num_merges = lines.size() - 1 - vocab_size;

  auto split = [](std::string_view line) {
    const auto sp = line.find(' ');
    if (sp == std::string_view::npos || sp == 0 || sp + 1 >= line.size() ||
        line.find(' ', sp + 1) != std::string_view::npos) {
      throw FormatError("BPE model: malformed line '" + std::string(line) + "'");
    }
    return std::pair{line.substr(0, sp), line.substr(sp + 1)};
  };

  BpeModel model;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    auto [id_text, sub] = split(lines[1 + num_merges + i]);
    std::size_t id = 0;
    auto [q, ec2] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (ec2 != std::errc{} || q != id_text.data() + id_text.size() || id != i) {
      throw FormatError("BPE model: vocabulary ids must be 0..n-1 in order");
    }
    if (model.ids_.count(std::string(sub))) throw FormatError("BPE model: duplicate subword");
    model.add_subword(std::string(sub));
  }
  if (std::vector(model.vocab_.begin(), model.vocab_.begin() + kNumSpecials) != special_strings()) {
    throw FormatError("BPE model: reserved ids 0..2 do not hold the special tokens");
  }
  for (std::size_t i = 0; i < num_merges; ++i) {
    auto [l, r] = split(lines[1 + i]);
    const std::string merged = std::string(l) + std::string(r);
    if (!model.ids_.count(std::string(l)) || !model.ids_.count(std::string(r)) ||
        !model.ids_.count(merged)) {
      throw FormatError("BPE model: merge '" + std::string(lines[1 + i]) +
                        "' refers to unknown subwords");
    }
    const std::pair key{model.ids_.at(std::string(l)), model.ids_.at(std::string(r))};
    // A pair can legitimately recur when a later merge rebuilds an existing
    // subword; the first rank wins, as during training.
    model.rank_.emplace(key, std::pair{model.merges_.size(), model.ids_.at(merged)});
    model.merges_.emplace_back(std::string(l), std::string(r));
  }
  check_replay(model);
  return model;
}

void BpeModel::save(const std::filesystem::path& path) const { atomic_write(path, serialize()); }

BpeModel BpeModel::load(const std::filesystem::path& path) { return parse(read_file_text(path)); }

class BpeBuilder {
 public:
  static BpeModel train(const std::map<std::string, std::size_t>& counts, std::size_t target);
};

BpeModel BpeBuilder::train(const std::map<std::string, std::size_t>& token_counts,
                           std::size_t target) {
  std::map<std::string, std::size_t> word_counts;
  for (const auto& [token, n] : token_counts) {
    if (n == 0) continue;
    for (auto w : split_words(token)) word_counts[std::string(w)] += n;
  }
  if (word_counts.empty()) throw TrainingError("BPE training stream is empty");

  std::set<std::string> alphabet;
  for (const auto& [w, n] : word_counts) {
    for (auto ch : utf8_chars(w)) {
      if (ch != kMarker) alphabet.emplace(ch);
    }
  }
  BpeModel model;
  for (auto& s : special_strings()) model.add_subword(std::move(s));
  for (const auto& ch : alphabet) model.add_subword(ch);
  if (target < model.vocab_size()) {
    throw ParameterError("target vocabulary size " + std::to_string(target) +
                         " is below alphabet + specials = " + std::to_string(model.vocab_size()));
  }

  std::vector<std::vector<TokenId>> words;
  std::vector<std::int64_t> freq;
  for (const auto& [w, n] : word_counts) {
    std::vector<TokenId> symbols;
    for (auto ch : utf8_chars(w)) {
      symbols.push_back(ch == kMarker ? BpeModel::kUnk : *model.lookup(ch));
    }
    words.push_back(std::move(symbols));
    freq.push_back(static_cast<std::int64_t>(n));
  }

  using Pair = std::pair<TokenId, TokenId>;
  struct Key {
    std::int64_t count;
    Pair pair;
  };
  const auto& vocab = model.vocab_;
  auto cmp = [&vocab](const Key& a, const Key& b) {
    if (a.count != b.count) return a.count > b.count;
    const auto& al = vocab[a.pair.first];
    const auto& bl = vocab[b.pair.first];
    if (al != bl) return al < bl;
    return vocab[a.pair.second] < vocab[b.pair.second];
  };
  std::set<Key, decltype(cmp)> queue(cmp);
  std::map<Pair, std::int64_t> counts;
  std::map<Pair, std::vector<std::size_t>> where;

  auto bump = [&](const Pair& p, std::int64_t delta) {
    auto& c = counts[p];
    if (c > 0) queue.erase(Key{c, p});
    c += delta;
    if (c > 0) queue.insert(Key{c, p});
  };
  auto for_each_pair = [](const std::vector<TokenId>& w, auto&& fn) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] != BpeModel::kUnk && w[i + 1] != BpeModel::kUnk) fn(Pair{w[i], w[i + 1]});
    }
  };

  for (std::size_t wi = 0; wi < words.size(); ++wi) {
    for_each_pair(words[wi], [&](const Pair& p) {
      bump(p, freq[wi]);
      auto& list = where[p];
      if (list.empty() || list.back() != wi) list.push_back(wi);
    });
  }

  while (model.vocab_size() < target && !queue.empty()) {
    const Key best = *queue.begin();
    if (best.count < 2) break;
    const Pair p = best.pair;
    model.add_merge({vocab[p.first], vocab[p.second]});
    const TokenId merged = model.lookup(vocab[p.first] + vocab[p.second]).value();

    auto affected = std::move(where[p]);
    where.erase(p);
    for (std::size_t wi : affected) {
      auto& w = words[wi];
      bool present = false;
      for (std::size_t i = 0; i + 1 < w.size() && !present; ++i) {
        present = w[i] == p.first && w[i + 1] == p.second;
      }
      if (!present) continue;
      for_each_pair(w, [&](const Pair& q) { bump(q, -freq[wi]); });
      std::vector<TokenId> next;
      next.reserve(w.size());
      for (std::size_t i = 0; i < w.size();) {
        if (i + 1 < w.size() && w[i] == p.first && w[i + 1] == p.second) {
          next.push_back(merged);
          i += 2;
        } else {
          next.push_back(w[i++]);
        }
      }
      w.swap(next);
      for_each_pair(w, [&](const Pair& q) {
        bump(q, freq[wi]);
        auto& list = where[q];
        if (list.empty() || list.back() != wi) list.push_back(wi);
      });
    }
  }
  return model;
}

BpeModel bpe_train(const std::map<std::string, std::size_t>& token_counts,
                   std::size_t target_vocab_size) {
  return BpeBuilder::train(token_counts, target_vocab_size);
}

BpeModel bpe_train(std::span<const std::string> token_stream, std::size_t target_vocab_size) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : token_stream) ++counts[t];
  return BpeBuilder::train(counts, target_vocab_size);
}

std::vector<TokenId> tokenize_surface(std::span<const std::string> surface_tokens,
                                      const BpeModel& model, std::size_t cap) {
  std::vector<TokenId> ids;
  for (const auto& tok : normalize_surface_tokens(surface_tokens)) {
    for (TokenId id : model.encode(tok)) {
      if (id == BpeModel::kBoundary) continue;
      if (ids.size() == cap) return ids;
      ids.push_back(id);
    }
  }
  return ids;
}

std::vector<TokenId> tokenize_query(std::string_view text, const BpeModel& model,
                                    std::size_t cap) {
  const auto words = lex_text(text);
  return tokenize_surface(words, model, cap);
}

}  // namespace scs
