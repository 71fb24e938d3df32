// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/language.hpp"

namespace scs {

namespace {
constexpr std::array<std::string_view, kNumLanguages> kTags = {
    "go", "java", "javascript", "php", "python", "ruby"};
constexpr std::array<std::string_view, kNumLanguages> kLabels = {
    "Go", "Java", "JavaScript", "Php", "Python", "Ruby"};
}  // namespace

std::string_view language_tag(Language lang) {
  return kTags[static_cast<std::size_t>(lang)];
}

std::string_view language_label(Language lang) {
  return kLabels[static_cast<std::size_t>(lang)];
}

std::optional<Language> parse_language(std::string_view tag) {
  for (std::size_t i = 0; i < kNumLanguages; ++i) {
    if (kTags[i] == tag) return static_cast<Language>(i);
  }
  return std::nullopt;
}

std::string supported_languages_list() {
  std::string out;
  for (std::size_t i = 0; i < kNumLanguages; ++i) {
    if (i) out += ", ";
    out += kTags[i];
  }
  return out;
}

}  // namespace scs
