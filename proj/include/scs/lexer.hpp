// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scs/language.hpp"

namespace scs {

/// Sentinel emitted in place of every string literal.
inline constexpr std::string_view kStringSentinel = "STR";

/// Heuristic code lexer. Rules:
///  - whitespace and comments (per language) are dropped;
///  - string literals, including Python triple-quoted and prefixed forms,
///    collapse to kStringSentinel;
///  - numeric literals are one token;
///  - identifiers are split on '_' and camel-case boundaries, lower-cased;
///  - operators use longest match over a fixed table; any other byte is a
///    single-character token.
/// Lexing is total: every input produces a token stream.
std::vector<std::string> lex_code(std::string_view source, Language lang);

/// Lexer for natural-language text (queries, docstrings): identifier
/// splitting and lower-casing as in lex_code, but no strings or comments.
std::vector<std::string> lex_text(std::string_view text);

/// "parseHTTPResponse_v2" -> {"parse", "http", "response", "v2"}.
std::vector<std::string> split_identifier(std::string_view identifier);

/// Normalizes pre-tokenized corpus tokens with the same rules the lexers
/// apply, so corpus text and raw queries share one surface vocabulary.
std::vector<std::string> normalize_surface_tokens(std::span<const std::string> tokens);

}  // namespace scs
