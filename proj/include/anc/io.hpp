#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "anc/adaptive.hpp"
#include "anc/sample_buffer.hpp"

namespace anc {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binary format: magic "ANCB", u32 version, f64 sample_rate_hz (16-byte
// header), then little-endian IEEE-754 doubles.
inline constexpr std::uint32_t kSampleBufferFormatVersion = 1;

void write_sample_buffer(const std::filesystem::path& path, const SampleBuffer& buf);
SampleBuffer read_sample_buffer(const std::filesystem::path& path);

// CSV export: `time_s,value`, 9 significant digits. The header comment carries
// provenance (config hash and seed) when given.
void write_sample_buffer_csv(const std::filesystem::path& path, const SampleBuffer& buf,
                             const std::string& provenance = {});

// Plain-text model document; coefficients at 17 significant digits so the
// round-trip is exact.
void save_model(const std::filesystem::path& path, const SecondaryPathModel& model);
SecondaryPathModel load_model(const std::filesystem::path& path);

// FNV-1a 64-bit, used for config hashes.
std::uint64_t fnv1a64(const std::string& data);
std::string hash_hex(std::uint64_t h);

}  // namespace anc
