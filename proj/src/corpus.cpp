// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/corpus.hpp"

#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "scs/error.hpp"

namespace scs {

using nlohmann::json;

std::string_view partition_name(Partition p) {
  switch (p) {
    case Partition::Train: return "train";
    case Partition::Valid: return "valid";
    case Partition::Test: return "test";
  }
  return "?";
}

std::optional<Partition> parse_partition(std::string_view name) {
  if (name == "train") return Partition::Train;
  if (name == "valid") return Partition::Valid;
  if (name == "test") return Partition::Test;
  return std::nullopt;
}

namespace {

std::vector<std::string> string_array(const json& record, const char* field) {
  const auto& value = record.at(field);
  if (!value.is_array()) throw SchemaError(std::string(field) + ": expected an array of strings");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) throw SchemaError(std::string(field) + ": expected an array of strings");
    auto s = item.get<std::string>();
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

std::optional<std::string> optional_string(const json& record, const char* field) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(std::string(field) + ": expected a string");
  return it->get<std::string>();
}

void cap(std::vector<std::string>& tokens, std::size_t limit) {
  if (tokens.size() > limit) tokens.resize(limit);
}

}  // namespace

std::vector<std::string> summarize_docstring(std::string_view raw_doc) {
  std::string text(raw_doc);
  for (auto& c : text) {
    if (c == '\r') c = '\n';
  }
  // First paragraph: everything before the first line that is blank.
  static const std::regex blank_line(R"(\n[ \t]*\n)");
  std::smatch m;
  if (std::regex_search(text, m, blank_line)) text = text.substr(0, m.position(0));

  // Inline markup: {@link Foo} -> Foo, <tags> and backticks/emphasis removed.
  static const std::regex inline_tag(R"(\{@\w+\s*([^}]*)\})");
  static const std::regex html_tag(R"(<[^>\n]*>)");
  static const std::regex emphasis(R"([`*]+)");
  text = std::regex_replace(text, inline_tag, "$1");
  text = std::regex_replace(text, html_tag, " ");
  text = std::regex_replace(text, emphasis, "");

  std::vector<std::string> tokens;
  std::istringstream in(text);
  for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
  return tokens;
}

CorpusEntry parse_corpus_line(std::string_view line, const CorpusOptions& options) {
  json record;
  try {
    record = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("malformed record at byte " + std::to_string(offset), offset);
  }
  if (!record.is_object()) throw SchemaError("record: expected an object");

  CorpusEntry entry;
  if (!record.contains("id")) throw SchemaError("id");
  if (!record["id"].is_string()) throw SchemaError("id: expected a string");
  entry.id = record["id"].get<std::string>();
  if (entry.id.empty()) throw SchemaError("id: empty");

  if (!record.contains("language")) throw SchemaError("language");
  if (!record["language"].is_string()) throw SchemaError("language: expected a string");
  const auto tag = record["language"].get<std::string>();
  const auto lang = parse_language(tag);
  if (!lang) {
    throw DomainError("unsupported language '" + tag + "'; supported: " +
                      supported_languages_list());
  }
  entry.language = *lang;

  entry.raw_doc = optional_string(record, "raw_doc");
  entry.raw_code = optional_string(record, "raw_code");

  if (record.contains("doc_tokens") && !record["doc_tokens"].is_null()) {
    entry.doc_tokens = string_array(record, "doc_tokens");
  } else if (entry.raw_doc) {
    entry.doc_tokens = summarize_docstring(*entry.raw_doc);
  } else {
    throw SchemaError("doc_tokens");
  }
  if (!record.contains("code_tokens")) throw SchemaError("code_tokens");
  entry.code_tokens = string_array(record, "code_tokens");

  if (entry.doc_tokens.empty()) throw SchemaError("doc_tokens: empty");
  if (entry.code_tokens.empty()) throw SchemaError("code_tokens: empty");
  cap(entry.doc_tokens, options.max_doc_tokens);
  cap(entry.code_tokens, options.max_code_tokens);
  return entry;
}

std::string serialize_corpus_entry(const CorpusEntry& entry) {
  json record;
  record["id"] = entry.id;
  record["language"] = std::string(language_tag(entry.language));
  record["doc_tokens"] = entry.doc_tokens;
  record["code_tokens"] = entry.code_tokens;
  if (entry.raw_doc) record["raw_doc"] = *entry.raw_doc;
  if (entry.raw_code) record["raw_code"] = *entry.raw_code;
  return record.dump();
}

CorpusSplit load_split(const std::filesystem::path& path, Partition partition,
                       const CorpusOptions& options, LoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());

  LoadReport local;
  LoadReport& rep = report ? *report : local;
  rep = LoadReport{};

  CorpusSplit split;
  split.partition = partition;
  std::unordered_set<std::string> seen;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++rep.lines;
    try {
      auto entry = parse_corpus_line(line, options);
      if (!seen.insert(entry.id).second) {
        throw SchemaError("id: duplicate '" + entry.id + "'");
      }
      split.entries.push_back(std::move(entry));
    } catch (const Error& e) {
      rep.rejected.push_back({line_number, e.kind() + ": " + e.what()});
    }
  }
  if (in.bad()) throw IoError("read failed: " + path.string());

  rep.accepted = split.entries.size();
  if (rep.lines == 0) rep.warnings.push_back("no records in " + path.string());
  if (rep.lines > 0) {
    const double bad = static_cast<double>(rep.rejected.size()) / static_cast<double>(rep.lines);
    if (bad > options.max_invalid_fraction) {
      std::ostringstream msg;
      msg << path.string() << ": " << rep.rejected.size() << " of " << rep.lines
          << " lines invalid (threshold " << options.max_invalid_fraction << ")";
      if (!rep.rejected.empty()) {
        msg << "; first at line " << rep.rejected.front().line_number << ": "
            << rep.rejected.front().message;
      }
      throw CorpusQualityError(msg.str());
    }
  }
  return split;
}

std::size_t SplitStats::partition_total(Partition part) const {
  std::size_t n = 0;
  for (const auto& row : counts_) n += row[static_cast<std::size_t>(part)];
  return n;
}

std::size_t SplitStats::total() const {
  std::size_t n = 0;
  for (const auto& row : counts_)
    for (auto c : row) n += c;
  return n;
}

std::string SplitStats::to_table() const {
  std::ostringstream out;
  out << std::left << std::setw(10) << "Partition";
  for (auto lang : kAllLanguages) out << std::right << std::setw(12) << language_label(lang);
  out << '\n';
  for (auto part : {Partition::Train, Partition::Test, Partition::Valid}) {
    std::string name(partition_name(part));
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    out << std::left << std::setw(10) << name;
    for (auto lang : kAllLanguages) out << std::right << std::setw(12) << count(lang, part);
    out << '\n';
  }
  return out.str();
}

SplitStats split_stats(std::span<const CorpusSplit> splits) {
  SplitStats stats;
  for (const auto& split : splits)
    for (const auto& e : split.entries) stats.add(e.language, split.partition);
  return stats;
}

void check_partition_disjoint(std::span<const CorpusSplit> splits) {
  std::unordered_map<std::string_view, Partition> owner;
  for (const auto& split : splits) {
    for (const auto& e : split.entries) {
      auto [it, inserted] = owner.emplace(e.id, split.partition);
      if (!inserted && it->second != split.partition) {
        throw DomainError("id '" + e.id + "' appears in both " +
                          std::string(partition_name(it->second)) + " and " +
                          std::string(partition_name(split.partition)));
      }
    }
  }
}

}  // namespace scs
