#include "anc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anc/fft.hpp"
#include "anc/rng.hpp"

namespace anc {

namespace {

std::vector<double> make_window(WindowKind kind, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::Hann && n > 1) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
    }
  }
  return w;
}

struct SegmentedSpectra {
  std::vector<double> sx, sy;                // averaged one-sided densities
  std::vector<std::complex<double>> sxy;     // averaged one-sided cross density
  double bin_width_hz = 0.0;
  std::size_t segment_count = 0;
  std::vector<double> freqs;
};

// Shared segmentation for auto- and cross-spectra. Per-segment spectra are
// computed independently (parallel when OpenMP is enabled) and summed in
// segment order, so results do not depend on thread count.
SegmentedSpectra welch_core(const SampleBuffer& x, const SampleBuffer* y,
                            const WelchParams& params, bool serial = false) {
  if (!(x.sample_rate_hz > 0.0)) throw std::invalid_argument("welch: sample_rate_hz must be > 0");
  if (x.samples.empty()) throw std::invalid_argument("welch: empty input");
  if (params.segment_len == 0 || params.segment_len > x.samples.size()) {
    throw std::invalid_argument("welch: segment longer than signal");
  }
  if (!(params.overlap_fraction >= 0.0) || !(params.overlap_fraction < 1.0)) {
    throw std::invalid_argument("welch: overlap_fraction must be in [0,1)");
  }
  if (y != nullptr) {
    if (y->samples.size() != x.samples.size() || y->sample_rate_hz != x.sample_rate_hz) {
      throw std::invalid_argument("welch: signal length/rate mismatch");
    }
  }

  const std::size_t nper = params.segment_len;
  const std::size_t noverlap =
      static_cast<std::size_t>(std::floor(static_cast<double>(nper) * params.overlap_fraction));
  const std::size_t hop = nper > noverlap ? nper - noverlap : 1;
  const std::size_t nfft = next_power_of_two(nper);
  const std::size_t nfreq = nfft / 2 + 1;
  const double fs = x.sample_rate_hz;

  const std::vector<double> window = make_window(params.window, nper);
  double u = 0.0;
  for (double w : window) u += w * w;

  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + nper <= x.samples.size(); s += hop) starts.push_back(s);
  const std::size_t nseg = starts.size();

  std::vector<std::vector<double>> seg_sx(nseg), seg_sy(nseg);
  std::vector<std::vector<std::complex<double>>> seg_sxy(nseg);

  auto process_segment = [&](std::size_t si) {
    const std::size_t start = starts[si];
    std::vector<std::complex<double>> bx(nfft, 0.0), by;
    for (std::size_t i = 0; i < nper; ++i) bx[i] = x.samples[start + i] * window[i];
    fft_radix2(bx, false);
    if (y != nullptr) {
      by.assign(nfft, 0.0);
      for (std::size_t i = 0; i < nper; ++i) by[i] = y->samples[start + i] * window[i];
      fft_radix2(by, false);
    }

    const double scale = 1.0 / (fs * u);
    auto& osx = seg_sx[si];
    osx.resize(nfreq);
    for (std::size_t k = 0; k < nfreq; ++k) {
      double p = std::norm(bx[k]) * scale;
      if (k != 0 && k != nfft / 2) p *= 2.0;
      osx[k] = p;
    }
    if (y != nullptr) {
      auto& osy = seg_sy[si];
      auto& oxy = seg_sxy[si];
      osy.resize(nfreq);
      oxy.resize(nfreq);
      for (std::size_t k = 0; k < nfreq; ++k) {
        double py = std::norm(by[k]) * scale;
        std::complex<double> pxy = std::conj(bx[k]) * by[k] * scale;
        if (k != 0 && k != nfft / 2) {
          py *= 2.0;
          pxy *= 2.0;
        }
        osy[k] = py;
        oxy[k] = pxy;
      }
    }
  };

  if (serial) {
    for (std::size_t si = 0; si < nseg; ++si) process_segment(si);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(nseg); ++si) {
      process_segment(static_cast<std::size_t>(si));
    }
  }

  SegmentedSpectra out;
  out.segment_count = nseg;
  out.bin_width_hz = fs / static_cast<double>(nfft);
  out.sx.assign(nfreq, 0.0);
  if (y != nullptr) {
    out.sy.assign(nfreq, 0.0);
    out.sxy.assign(nfreq, std::complex<double>(0.0, 0.0));
  }
  for (std::size_t si = 0; si < nseg; ++si) {
    for (std::size_t k = 0; k < nfreq; ++k) {
      out.sx[k] += seg_sx[si][k];
      if (y != nullptr) {
        out.sy[k] += seg_sy[si][k];
        out.sxy[k] += seg_sxy[si][k];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(nseg);
  for (std::size_t k = 0; k < nfreq; ++k) {
    out.sx[k] *= inv;
    if (y != nullptr) {
      out.sy[k] *= inv;
      out.sxy[k] *= inv;
    }
  }
  out.freqs.resize(nfreq);
  for (std::size_t k = 0; k < nfreq; ++k) out.freqs[k] = static_cast<double>(k) * out.bin_width_hz;
  return out;
}

}  // namespace

SpectrumEstimate welch_psd(const SampleBuffer& input, const WelchParams& params) {
  SegmentedSpectra core = welch_core(input, nullptr, params);
  SpectrumEstimate out;
  out.frequency_hz = std::move(core.freqs);
  out.value = std::move(core.sx);
  out.bin_width_hz = core.bin_width_hz;
  out.segment_count = core.segment_count;
  return out;
}

SpectrumEstimate welch_psd_serial(const SampleBuffer& input, const WelchParams& params) {
  SegmentedSpectra core = welch_core(input, nullptr, params, /*serial=*/true);
  SpectrumEstimate out;
  out.frequency_hz = std::move(core.freqs);
  out.value = std::move(core.sx);
  out.bin_width_hz = core.bin_width_hz;
  out.segment_count = core.segment_count;
  return out;
}

SpectrumEstimate cross_psd(const SampleBuffer& x, const SampleBuffer& y,
                           const WelchParams& params) {
  SegmentedSpectra core = welch_core(x, &y, params);
  SpectrumEstimate out;
  out.frequency_hz = std::move(core.freqs);
  out.cvalue = std::move(core.sxy);
  out.bin_width_hz = core.bin_width_hz;
  out.segment_count = core.segment_count;
  return out;
}

SpectrumEstimate coherence(const SampleBuffer& x, const SampleBuffer& y,
                           const WelchParams& params) {
  SegmentedSpectra core = welch_core(x, &y, params);
  if (core.segment_count < 2) {
    throw std::invalid_argument("coherence: needs at least 2 segments");
  }
  SpectrumEstimate out;
  out.frequency_hz = std::move(core.freqs);
  out.bin_width_hz = core.bin_width_hz;
  out.segment_count = core.segment_count;
  out.value.resize(core.sx.size());
  for (std::size_t k = 0; k < core.sx.size(); ++k) {
    if (core.sx[k] < kCoherenceFloor || core.sy[k] < kCoherenceFloor) {
      out.value[k] = 0.0;
    } else {
      double g = std::norm(core.sxy[k]) / (core.sx[k] * core.sy[k]);
      out.value[k] = std::clamp(g, 0.0, 1.0);
    }
  }
  return out;
}

SpectrumEstimate max_cancellation_db(const SpectrumEstimate& coh) {
  SpectrumEstimate out;
  out.frequency_hz = coh.frequency_hz;
  out.bin_width_hz = coh.bin_width_hz;
  out.segment_count = coh.segment_count;
  out.value.resize(coh.value.size());
  for (std::size_t k = 0; k < coh.value.size(); ++k) {
    const double g = coh.value[k];
    if (!(g >= 0.0) || !(g <= 1.0)) {
      throw std::invalid_argument("max_cancellation_db: coherence value outside [0,1]");
    }
    const double a = (g >= 1.0) ? kCancellationCeilingDb : -10.0 * std::log10(1.0 - g);
    out.value[k] = std::min(a, kCancellationCeilingDb);
  }
  return out;
}

double rms_in_band(const SpectrumEstimate& psd, double f_lo, double f_hi) {
  if (!(f_lo >= 0.0) || !(f_hi > f_lo)) throw std::invalid_argument("rms_in_band: invalid band");
  double power = 0.0;
  for (std::size_t k = 0; k < psd.bins(); ++k) {
    const double f = psd.frequency_hz[k];
    if (f >= f_lo && f <= f_hi) power += psd.value[k] * psd.bin_width_hz;
  }
  return std::sqrt(power);
}

double rms_in_band(const SampleBuffer& input, double f_lo, double f_hi,
                   const WelchParams& params) {
  if (!(f_lo >= 0.0) || !(f_hi > f_lo) || !(f_hi <= input.sample_rate_hz / 2.0)) {
    throw std::invalid_argument("rms_in_band: invalid band");
  }
  return rms_in_band(welch_psd(input, params), f_lo, f_hi);
}

double suppression_db(double before_rms, double after_rms) {
  if (!(before_rms > 0.0) || !(after_rms > 0.0)) {
    throw std::invalid_argument("suppression_db: inputs must be > 0");
  }
  return 20.0 * std::log10(before_rms / after_rms);
}

double field_rms_to_larmor_hz(double rms_nt, double gamma_hz_per_nt) {
  if (rms_nt < 0.0 || gamma_hz_per_nt < 0.0) {
    throw std::invalid_argument("field_rms_to_larmor_hz: inputs must be >= 0");
  }
  return rms_nt * gamma_hz_per_nt;
}

std::size_t nearest_bin(const SpectrumEstimate& spec, double f_hz) {
  if (spec.bins() == 0) throw std::invalid_argument("nearest_bin: empty spectrum");
  const double idx = f_hz / spec.bin_width_hz;
  const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::llround(idx));
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(spec.bins()) - 1));
}

}  // namespace anc
