#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "anc/sample_buffer.hpp"

namespace anc {

// Frequency-binned density estimate. Auto-spectra carry real one-sided power
// density in value (units^2/Hz); cross-spectra carry complex density in
// cvalue. Frequencies start at 0 and increase by bin_width_hz.
struct SpectrumEstimate {
  std::vector<double> frequency_hz;
  std::vector<double> value;
  std::vector<std::complex<double>> cvalue;
  double bin_width_hz = 0.0;
  std::size_t segment_count = 0;

  bool is_complex() const { return !cvalue.empty(); }
  std::size_t bins() const { return frequency_hz.size(); }
};

enum class WindowKind { Hann, Rect };

struct WelchParams {
  std::size_t segment_len = 4096;
  double overlap_fraction = 0.5;
  WindowKind window = WindowKind::Hann;
};

// One-sided Welch PSD. Integral over bins approximates signal variance plus
// DC power; a constant signal lands in the 0 Hz bin.
SpectrumEstimate welch_psd(const SampleBuffer& input, const WelchParams& params);
SpectrumEstimate welch_psd_serial(const SampleBuffer& input, const WelchParams& params);

// Complex cross density S_xy = E[conj(X) Y] with the same segmentation as
// welch_psd, so a pure delay y(n)=x(n-1) shows phase -2*pi*f/f_s.
SpectrumEstimate cross_psd(const SampleBuffer& x, const SampleBuffer& y,
                           const WelchParams& params);

// gamma^2(f) = |S_xy|^2 / (S_x S_y), per bin in [0,1]. Bins where either
// auto-spectrum falls below kCoherenceFloor report 0 (no-cancellation value).
SpectrumEstimate coherence(const SampleBuffer& x, const SampleBuffer& y,
                           const WelchParams& params);

inline constexpr double kCoherenceFloor = 1e-30;
inline constexpr double kCancellationCeilingDb = 60.0;

// alpha(f) = -10*log10(1 - gamma^2(f)), clamped at kCancellationCeilingDb.
SpectrumEstimate max_cancellation_db(const SpectrumEstimate& coh);

// sqrt of integrated PSD over [f_lo, f_hi].
double rms_in_band(const SampleBuffer& input, double f_lo, double f_hi,
                   const WelchParams& params);
double rms_in_band(const SpectrumEstimate& psd, double f_lo, double f_hi);

// 20*log10(before/after).
double suppression_db(double before_rms, double after_rms);

inline constexpr double kCesiumGammaHzPerNt = 3.5;  // 350 kHz/G

double field_rms_to_larmor_hz(double rms_nt, double gamma_hz_per_nt = kCesiumGammaHzPerNt);

// Index of the bin closest to f.
std::size_t nearest_bin(const SpectrumEstimate& spec, double f_hz);

}  // namespace anc
