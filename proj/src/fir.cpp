#include "anc/fir.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anc/rng.hpp"

namespace anc {

void validate(const FirFilter& f) {
  if (f.coefficients.empty()) throw std::invalid_argument("FirFilter: needs at least one tap");
  for (double c : f.coefficients) {
    if (!std::isfinite(c)) throw std::invalid_argument("FirFilter: non-finite coefficient");
  }
}

static SampleBuffer fir_apply_impl(const FirFilter& filter, const SampleBuffer& input,
                                   bool parallel) {
  validate(filter);
  if (input.samples.empty()) throw std::invalid_argument("fir_apply: empty input signal");

  const std::vector<double>& c = filter.coefficients;
  const std::vector<double>& x = input.samples;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(c.size());

  SampleBuffer out;
  out.sample_rate_hz = input.sample_rate_hz;
  out.samples.resize(x.size());

#pragma omp parallel for schedule(static) if (parallel && n > 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t kmax = std::min(m - 1, i);
    double acc = 0.0;
    for (std::ptrdiff_t k = 0; k <= kmax; ++k) acc += c[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(i - k)];
    out.samples[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

SampleBuffer fir_apply(const FirFilter& filter, const SampleBuffer& input) {
  return fir_apply_impl(filter, input, true);
}

SampleBuffer fir_apply_serial(const FirFilter& filter, const SampleBuffer& input) {
  return fir_apply_impl(filter, input, false);
}

std::vector<double> convolve_coefficients(const std::vector<double>& a,
                                          const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("convolve_coefficients: empty sequence");
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

FirFilter design_lowpass(std::size_t taps, double cutoff_hz, double sample_rate_hz) {
  if (taps == 0) throw std::invalid_argument("design_lowpass: taps must be >= 1");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    throw std::invalid_argument("design_lowpass: cutoff must be in (0, f_s/2)");
  }
  const double fc = cutoff_hz / sample_rate_hz;  // normalized
  const double center = 0.5 * static_cast<double>(taps - 1);
  FirFilter f;
  f.coefficients.resize(taps);
  double sum = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - center;
    const double sinc = (t == 0.0) ? 2.0 * fc : std::sin(2.0 * kPi * fc * t) / (kPi * t);
    const double w = taps == 1 ? 1.0
                               : 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                                        static_cast<double>(taps - 1));
    f.coefficients[i] = sinc * w;
    sum += f.coefficients[i];
  }
  for (double& c : f.coefficients) c /= sum;  // unity DC gain
  return f;
}

StreamingFir::StreamingFir(std::vector<double> coefficients)
    : coeffs_(std::move(coefficients)), line_(coeffs_.size(), 0.0) {
  if (coeffs_.empty()) throw std::invalid_argument("StreamingFir: empty coefficients");
}

double StreamingFir::push(double x) {
  for (std::size_t i = line_.size() - 1; i > 0; --i) line_[i] = line_[i - 1];
  line_[0] = x;
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) acc += coeffs_[i] * line_[i];
  return acc;
}

void StreamingFir::reset() { std::fill(line_.begin(), line_.end(), 0.0); }

}  // namespace anc
