#pragma once

#include <cstddef>
#include <vector>

#include "anc/sample_buffer.hpp"

namespace anc {

// Fixed-coefficient FIR filter. Applied at rate f_s the frequency resolution
// is f_s / taps().
struct FirFilter {
  std::vector<double> coefficients;

  std::size_t taps() const { return coefficients.size(); }
};

void validate(const FirFilter& f);

// y[n] = sum_i c[i] * x[n-i], zero initial state, output length = input length.
// Parallel over output samples when built with OpenMP; bitwise identical to
// fir_apply_serial either way.
SampleBuffer fir_apply(const FirFilter& filter, const SampleBuffer& input);
SampleBuffer fir_apply_serial(const FirFilter& filter, const SampleBuffer& input);

// Polynomial product of coefficient sequences; applying a then b equals
// applying convolve_coefficients(a, b).
std::vector<double> convolve_coefficients(const std::vector<double>& a,
                                          const std::vector<double>& b);

// Hamming-windowed sinc low-pass, unity DC gain.
FirFilter design_lowpass(std::size_t taps, double cutoff_hz, double sample_rate_hz);

// Sample-at-a-time FIR with internal delay line, for closed-loop use.
class StreamingFir {
 public:
  StreamingFir() = default;
  explicit StreamingFir(std::vector<double> coefficients);

  double push(double x);
  void reset();
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  std::vector<double> coeffs_;
  std::vector<double> line_;  // most recent first
};

}  // namespace anc
