// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scs {

using Bytes = std::vector<std::uint8_t>;

/// Appends little-endian scalars to a byte buffer.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void raw(std::string_view s);
  /// u32 length prefix followed by the bytes.
  void str(std::string_view s);

  const Bytes& bytes() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

/// Bounds-checked little-endian reader. Running past the end throws
/// CorruptionError so truncated files never yield partial objects.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  std::string raw(std::size_t n);
  std::string str();

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> data);
/// 64-bit content fingerprint: crc32 in the high word, adler32 in the low.
std::uint64_t fingerprint_of(std::span<const std::uint8_t> data);

Bytes read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written file.
void atomic_write(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void atomic_write(const std::filesystem::path& path, std::string_view text);

}  // namespace scs
