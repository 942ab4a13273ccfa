#include "anc/noise.hpp"

#include <stdexcept>

#include "anc/fir.hpp"
#include "anc/rng.hpp"

namespace anc {

SampleBuffer generate_white_noise(const WhiteNoiseSource& source, std::size_t n_samples,
                                  double sample_rate_hz) {
  if (n_samples == 0) throw std::invalid_argument("generate_white_noise: n_samples must be >= 1");
  if (!(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("generate_white_noise: sample_rate_hz must be > 0");
  }
  if (!(source.sigma > 0.0)) throw std::invalid_argument("generate_white_noise: sigma must be > 0");

  CounterRng rng(source.seed, RngStream::Generic);
  SampleBuffer out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    out.samples[i] = source.sigma * rng.gaussian(i);
  }

  if (source.band_limit_hz && *source.band_limit_hz < sample_rate_hz / 2.0) {
    const FirFilter lp = design_lowpass(129, *source.band_limit_hz, sample_rate_hz);
    out = fir_apply(lp, out);
  }
  return out;
}

}  // namespace anc
