// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scs {

/// Base class for every error raised by the library. `kind()` is a stable
/// lower-case tag used in machine-parseable CLI output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SCS_DEFINE_ERROR(Name, tag)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(tag, what) {}     \
  };

SCS_DEFINE_ERROR(SchemaError, "schema")
SCS_DEFINE_ERROR(DomainError, "domain")
SCS_DEFINE_ERROR(IoError, "io")
SCS_DEFINE_ERROR(CorpusQualityError, "corpus-quality")
SCS_DEFINE_ERROR(ParameterError, "parameter")
SCS_DEFINE_ERROR(ContractError, "contract")
SCS_DEFINE_ERROR(CorruptionError, "corruption")
SCS_DEFINE_ERROR(FormatError, "format")
SCS_DEFINE_ERROR(StalenessError, "staleness")
SCS_DEFINE_ERROR(InputError, "input")
SCS_DEFINE_ERROR(TrainingError, "training")
SCS_DEFINE_ERROR(UndefinedMetricError, "undefined-metric")

#undef SCS_DEFINE_ERROR

/// Malformed structured-text record; `offset()` is the byte offset of the
/// failure inside the record.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error("parse", what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace scs
