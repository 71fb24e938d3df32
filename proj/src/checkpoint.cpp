// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The scs Authors

#include "scs/checkpoint.hpp"

#include <cmath>
#include <cstring>

#include "scs/error.hpp"

namespace scs {

namespace {

constexpr std::string_view kMagic = "SCSM v1\n";
constexpr std::size_t kDimsBytes = 5 * 4;

std::string describe(const EncoderConfig& c) {
  return "vocab=" + std::to_string(c.vocab_size) + " d=" + std::to_string(c.dim) +
         " L=" + std::to_string(c.layers) + " act=" + std::string(activation_name(c.activation));
}

}  // namespace

Bytes checkpoint_payload(const EncoderParams& params) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(params.config.vocab_size));
  w.u32(static_cast<std::uint32_t>(params.config.dim));
  w.u32(static_cast<std::uint32_t>(params.config.layers));
  w.u32(static_cast<std::uint32_t>(kNumLanguages));
  w.u32(static_cast<std::uint32_t>(params.config.activation));
  for (auto t : params.tensors())
    for (double x : t) w.f32(static_cast<float>(x));
  return w.take();
}

Bytes checkpoint_bytes(const EncoderParams& params) {
  const Bytes payload = checkpoint_payload(params);
  ByteWriter w;
  w.raw(kMagic);
  w.raw(std::string_view(reinterpret_cast<const char*>(payload.data()), payload.size()));
  w.u32(crc32_of(payload));
  return w.take();
}

EncoderParams parse_checkpoint(std::span<const std::uint8_t> bytes,
                               const std::optional<EncoderConfig>& expected) {
  if (bytes.size() < kMagic.size() ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("not a model checkpoint (bad magic)");
  }
  if (bytes.size() < kMagic.size() + kDimsBytes + 4) throw CorruptionError("checkpoint truncated");
  const auto payload = bytes.subspan(kMagic.size(), bytes.size() - kMagic.size() - 4);
  ByteReader trailer(bytes.subspan(bytes.size() - 4));
  if (trailer.u32() != crc32_of(payload)) throw CorruptionError("checkpoint checksum mismatch");

  ByteReader r(payload);
  EncoderConfig config;
  config.vocab_size = r.u32();
  config.dim = r.u32();
  config.layers = r.u32();
  const auto languages = r.u32();
  const auto act = r.u32();
  if (languages != kNumLanguages) {
    throw FormatError("checkpoint has " + std::to_string(languages) + " languages, expected " +
                      std::to_string(kNumLanguages));
  }
  if (act > static_cast<std::uint32_t>(Activation::Relu) || config.dim == 0) {
    throw CorruptionError("checkpoint dims record is invalid");
  }
  config.activation = static_cast<Activation>(act);
  if (expected && !(*expected == config)) {
    throw ParameterError("checkpoint dims (" + describe(config) + ") do not match config (" +
                         describe(*expected) + ")");
  }

  // Size check before allocating anything large.
  const std::uint64_t d = config.dim;
  const std::uint64_t levels = config.layers + 1;
  const std::uint64_t expected_floats = config.vocab_size * d + Modality::kCount * d * d +
                                        config.layers * (d * d + d) + 2 * levels * d + levels + 1;
  if (r.remaining() != expected_floats * 4) {
    throw CorruptionError("checkpoint payload size does not match its dims record");
  }

  EncoderParams params = EncoderParams::zeros(config);
  for (auto t : params.tensors()) {
    for (double& x : t) {
      const float f = r.f32();
      if (!std::isfinite(f)) throw CorruptionError("checkpoint contains a non-finite value");
      x = f;
    }
  }
  return params;
}

void save_checkpoint(const EncoderParams& params, const std::filesystem::path& path) {
  atomic_write(path, checkpoint_bytes(params));
}

EncoderParams load_checkpoint(const std::filesystem::path& path,
                              const std::optional<EncoderConfig>& expected) {
  return parse_checkpoint(read_file_bytes(path), expected);
}

std::uint64_t model_fingerprint(const EncoderParams& params) {
  return fingerprint_of(checkpoint_payload(params));
}

}  // namespace scs
