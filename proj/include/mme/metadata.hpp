#pragma once

#include "mme/pipeline.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mme {

inline constexpr const char* kSidecarFormat = "mmewm-sidecar v1";

// Parameters shared out of band between embedder and extractor, stored as
// key=value lines closed by a crc32 line over everything before it.
struct Sidecar {
  SchemeSpec spec;
  std::uint64_t seed = 1;
  std::uint64_t payload_bits = 0;
  std::string payload_sha256;  // over the MSB-first packed payload
  std::string host_sha256;     // over the original input file bytes
  std::uint32_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint64_t samples_per_channel = 0;
  SampleFormat source_format = SampleFormat::Pcm16;
};

std::string serialize_sidecar(const Sidecar& sidecar);
// Throws IntegrityError on a checksum mismatch, FormatError on bad syntax.
Sidecar parse_sidecar(const std::string& text);

Sidecar read_sidecar(const std::filesystem::path& path);
void write_sidecar(const Sidecar& sidecar, const std::filesystem::path& path);

// Channel count, rate and length of the watermarked clip must match.
void check_sidecar(const Sidecar& sidecar, const AudioClip& watermarked);

std::string sha256_hex(std::span<const std::uint8_t> bytes);

// MSB-first packing, zero padded in the last byte.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes, std::uint64_t count);

std::string payload_digest(std::span<const std::uint8_t> bits);

}  // namespace mme
