#include "anc/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace anc {

namespace {
constexpr char kMagic[4] = {'A', 'N', 'C', 'B'};
}

void write_sample_buffer(const std::filesystem::path& path, const SampleBuffer& buf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic, 4);
  const std::uint32_t version = kSampleBufferFormatVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&buf.sample_rate_hz), sizeof(double));
  out.write(reinterpret_cast<const char*>(buf.samples.data()),
            static_cast<std::streamsize>(buf.samples.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + path.string());
}

SampleBuffer read_sample_buffer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open: " + path.string());
  const std::streamsize size = in.tellg();
  if (size < 16) throw IoError("truncated header: " + path.string());
  in.seekg(0);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad magic: " + path.string());
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kSampleBufferFormatVersion) {
    throw IoError("unsupported format version: " + path.string());
  }
  SampleBuffer buf;
  in.read(reinterpret_cast<char*>(&buf.sample_rate_hz), sizeof(double));
  if (static_cast<std::size_t>(size - 16) % sizeof(double) != 0) {
    throw IoError("truncated payload: " + path.string());
  }
  const std::size_t n = static_cast<std::size_t>(size - 16) / sizeof(double);
  buf.samples.resize(n);
  in.read(reinterpret_cast<char*>(buf.samples.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw IoError("read failed: " + path.string());
  return buf;
}

void write_sample_buffer_csv(const std::filesystem::path& path, const SampleBuffer& buf,
                             const std::string& provenance) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path.string());
  if (!provenance.empty()) std::fprintf(f, "# %s\n", provenance.c_str());
  std::fprintf(f, "time_s,value\n");
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    std::fprintf(f, "%.9g,%.9g\n", static_cast<double>(i) / buf.sample_rate_hz, buf.samples[i]);
  }
  std::fclose(f);
}

void save_model(const std::filesystem::path& path, const SecondaryPathModel& model) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path.string());
  std::fprintf(f, "version: 1\n");
  std::fprintf(f, "sample_rate_hz: %.17g\n", model.sample_rate_hz);
  std::fprintf(f, "taps: %zu\n", model.coefficients.size());
  std::fprintf(f, "mu_sp: %.17g\n", model.mu_sp);
  std::fprintf(f, "duration_s: %.17g\n", model.duration_s);
  std::fprintf(f, "residual_power: %.17g\n", model.residual_power);
  std::fprintf(f, "coefficients:\n");
  for (double c : model.coefficients) std::fprintf(f, "  %.17g\n", c);
  std::fclose(f);
}

SecondaryPathModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  SecondaryPathModel model;
  std::string line;
  std::size_t taps = 0;
  bool in_coeffs = false;
  while (std::getline(in, line)) {
    if (in_coeffs) {
      std::istringstream ss(line);
      double v;
      if (ss >> v) model.coefficients.push_back(v);
      continue;
    }
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    const std::string value = line.substr(colon + 1);
    if (key == "version") {
      if (std::stoi(value) != 1) throw IoError("unsupported model version: " + path.string());
    } else if (key == "sample_rate_hz") {
      model.sample_rate_hz = std::stod(value);
    } else if (key == "taps") {
      taps = static_cast<std::size_t>(std::stoul(value));
    } else if (key == "mu_sp") {
      model.mu_sp = std::stod(value);
    } else if (key == "duration_s") {
      model.duration_s = std::stod(value);
    } else if (key == "residual_power") {
      model.residual_power = std::stod(value);
    } else if (key == "coefficients") {
      in_coeffs = true;
    } else {
      throw IoError("unknown model field '" + key + "' in " + path.string());
    }
  }
  if (model.coefficients.size() != taps) {
    throw IoError("coefficient count mismatch in " + path.string());
  }
  return model;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return std::string(buf);
}

}  // namespace anc
