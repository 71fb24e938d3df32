// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "scs/binary_io.hpp"
#include "scs/encoder.hpp"

namespace scs {

// Layout (little-endian):
//   "SCSM v1\n"
//   u32 vocab_size, u32 dim, u32 layers, u32 language_count, u32 activation
//   f32 tensors in EncoderParams::tensors() order, matrices row-major
//   u32 crc32 of every byte between the magic and the checksum

/// Dims record plus tensors, i.e. the checksummed region.
Bytes checkpoint_payload(const EncoderParams& params);
Bytes checkpoint_bytes(const EncoderParams& params);

/// Throws FormatError (bad magic), CorruptionError (checksum, truncation,
/// non-finite values) or ParameterError (dims differ from `expected`).
EncoderParams parse_checkpoint(std::span<const std::uint8_t> bytes,
                               const std::optional<EncoderConfig>& expected = std::nullopt);

void save_checkpoint(const EncoderParams& params, const std::filesystem::path& path);
EncoderParams load_checkpoint(const std::filesystem::path& path,
                              const std::optional<EncoderConfig>& expected = std::nullopt);

/// Identity of a parameter set as it would be persisted; indexes record it
/// to detect queries encoded with a different model.
std::uint64_t model_fingerprint(const EncoderParams& params);

}  // namespace scs
