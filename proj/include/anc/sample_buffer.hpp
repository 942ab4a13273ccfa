#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace anc {

// Finite sequence of real samples at a fixed rate. Units depend on context
// (volts at the DAC, nanotesla at a sensor).
struct SampleBuffer {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

inline void validate(const SampleBuffer& buf) {
  if (!(buf.sample_rate_hz > 0.0)) {
    throw std::invalid_argument("SampleBuffer: sample_rate_hz must be > 0");
  }
  for (double s : buf.samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("SampleBuffer: non-finite sample");
  }
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

inline double rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace anc
