// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/lexer.hpp"

#include <array>

namespace scs {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_high(char c) { return static_cast<unsigned char>(c) >= 0x80; }
bool is_ident_start(char c) { return is_lower(c) || is_upper(c) || c == '_' || is_high(c); }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_quote(char c) { return c == '"' || c == '\'' || c == '`'; }

char to_lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

// Longest first within each length class.
constexpr std::array<std::string_view, 35> kOperators = {
    "===", "!==", "**=", "<<=", ">>=", "...", "<=>", "->", "=>", "==", "!=", "<=",
    ">=",  "&&",  "||",  "++",  "--",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=",
    "^=",  "::",  "**",  "<<",  ">>",  ":=",  "<-",  "?.", "??", "//", "&^"};

std::size_t operator_length(std::string_view rest) {
  for (auto op : kOperators) {
    if (rest.substr(0, op.size()) == op) return op.size();
  }
  return 1;
}

bool is_string_prefix(std::string_view ident) {
  if (ident.empty() || ident.size() > 2) return false;
  for (char c : ident) {
    const char l = to_lower(c);
    if (l != 'r' && l != 'b' && l != 'u' && l != 'f') return false;
  }
  return true;
}

/// Returns the index one past the end of the string literal starting at
/// `i` (which must point at a quote).
std::size_t skip_string(std::string_view s, std::size_t i) {
  const char q = s[i];
  const bool triple = i + 2 < s.size() && s[i + 1] == q && s[i + 2] == q;
  if (triple) {
    std::size_t j = i + 3;
    while (j < s.size()) {
      if (s[j] == '\\') {
        j += 2;
        continue;
      }
      if (j + 2 < s.size() && s[j] == q && s[j + 1] == q && s[j + 2] == q) return j + 3;
      ++j;
    }
    return s.size();
  }
  std::size_t j = i + 1;
  while (j < s.size()) {
    const char c = s[j];
    if (c == '\\') {
      j += 2;
      continue;
    }
    if (c == q) return j + 1;
    // Backtick strings may span lines; others end at the line break.
    if (c == '\n' && q != '`') return j;
    ++j;
  }
  return s.size();
}

struct CommentStyle {
  bool hash = false;
  bool slashes = false;
};

CommentStyle comment_style(Language lang) {
  switch (lang) {
    case Language::Python:
    case Language::Ruby: return {true, false};
    case Language::Php: return {true, true};
    case Language::Go:
    case Language::Java:
    case Language::JavaScript: return {false, true};
  }
  return {};
}

void append_identifier(std::string_view ident, std::vector<std::string>& out) {
  for (auto& part : split_identifier(ident)) out.push_back(std::move(part));
}

std::size_t skip_number(std::string_view s, std::size_t i) {
  std::size_t j = i;
  while (j < s.size() && (is_ident_char(s[j]) || s[j] == '.')) {
    if (s[j] == '.' && !(j + 1 < s.size() && is_digit(s[j + 1]))) break;
    ++j;
  }
  return j;
}

void lex_impl(std::string_view s, bool code, CommentStyle comments, std::vector<std::string>& out) {
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (code) {
      if (comments.hash && c == '#') {
        while (i < s.size() && s[i] != '\n') ++i;
        continue;
      }
      if (comments.slashes && c == '/' && i + 1 < s.size()) {
        if (s[i + 1] == '/') {
          while (i < s.size() && s[i] != '\n') ++i;
          continue;
        }
        if (s[i + 1] == '*') {
          const auto end = s.find("*/", i + 2);
          i = end == std::string_view::npos ? s.size() : end + 2;
          continue;
        }
      }
      if (is_quote(c)) {
        i = skip_string(s, i);
        out.emplace_back(kStringSentinel);
        continue;
      }
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      const auto ident = s.substr(i, j - i);
      if (code && j < s.size() && is_quote(s[j]) && is_string_prefix(ident)) {
        i = skip_string(s, j);
        out.emplace_back(kStringSentinel);
        continue;
      }
      append_identifier(ident, out);
      i = j;
      continue;
    }
    if (is_digit(c)) {
      const std::size_t j = skip_number(s, i);
      std::string num(s.substr(i, j - i));
      for (auto& ch : num) ch = to_lower(ch);
      out.push_back(std::move(num));
      i = j;
      continue;
    }
    const std::size_t n = code ? operator_length(s.substr(i)) : 1;
    out.emplace_back(s.substr(i, n));
    i += n;
  }
}

}  // namespace

std::vector<std::string> split_identifier(std::string_view ident) {
  std::vector<std::string> parts;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) parts.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < ident.size(); ++i) {
    const char c = ident[i];
    if (c == '_') {
      flush();
      continue;
    }
    if (is_upper(c) && !cur.empty()) {
      const char prev = ident[i - 1];
      const bool next_lower = i + 1 < ident.size() && is_lower(ident[i + 1]);
      // fooBar | foo2Bar | HTTPServer -> HTTP|Server
      if (is_lower(prev) || is_digit(prev) || (is_upper(prev) && next_lower)) flush();
    }
    cur.push_back(to_lower(c));
  }
  flush();
  return parts;
}

std::vector<std::string> lex_code(std::string_view source, Language lang) {
  std::vector<std::string> out;
  lex_impl(source, true, comment_style(lang), out);
  return out;
}

std::vector<std::string> lex_text(std::string_view text) {
  std::vector<std::string> out;
  lex_impl(text, false, {}, out);
  return out;
}

std::vector<std::string> normalize_surface_tokens(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    std::size_t q = 0;
    while (q < tok.size() && q < 2 && is_ident_start(tok[q])) ++q;
    const bool quoted = tok.size() >= 2 && q < tok.size() && is_quote(tok[q]) &&
                        (q == 0 || is_string_prefix(std::string_view(tok).substr(0, q)));
    if (quoted) {
      out.emplace_back(kStringSentinel);
      continue;
    }
    // Pre-tokenized operators ("==", "->") stay whole.
    bool all_punct = !tok.empty();
    for (char c : tok) {
      if (is_ident_char(c) || is_space(c)) all_punct = false;
    }
    if (all_punct && operator_length(tok) == tok.size()) {
      out.push_back(tok);
      continue;
    }
    lex_impl(tok, false, {}, out);
  }
  return out;
}

}  // namespace scs
