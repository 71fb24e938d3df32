// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace scs {

enum class Language : std::uint8_t { Go = 0, Java, JavaScript, Php, Python, Ruby };

inline constexpr std::size_t kNumLanguages = 6;

inline constexpr std::array<Language, kNumLanguages> kAllLanguages = {
    Language::Go,  Language::Java,   Language::JavaScript,
    Language::Php, Language::Python, Language::Ruby};

/// Lower-case corpus tag ("go", "java", ...).
std::string_view language_tag(Language lang);
/// Column label used in reports ("Go", "JavaScript", "Php", ...).
std::string_view language_label(Language lang);
std::optional<Language> parse_language(std::string_view tag);
/// "go, java, javascript, php, python, ruby"
std::string supported_languages_list();

/// Which alignment map / attention set an input goes through. The six code
/// languages each have their own map; natural-language text (queries and
/// docstrings) has one more.
class Modality {
 public:
  static constexpr std::size_t kCount = kNumLanguages + 1;

  static constexpr Modality query() { return Modality(kNumLanguages); }
  static constexpr Modality code(Language lang) {
    return Modality(static_cast<std::size_t>(lang));
  }

  constexpr std::size_t index() const { return index_; }
  constexpr bool is_query() const { return index_ == kNumLanguages; }
  constexpr bool operator==(const Modality&) const = default;

 private:
  constexpr explicit Modality(std::size_t i) : index_(i) {}
  std::size_t index_;
};

}  // namespace scs
