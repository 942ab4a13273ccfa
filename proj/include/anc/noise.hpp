#pragma once

#include <cstdint>
#include <optional>

#include "anc/sample_buffer.hpp"

namespace anc {

// Gaussian white noise: zero mean, variance sigma^2, vanishing autocorrelation
// at nonzero lag. Same seed gives bit-identical output.
struct WhiteNoiseSource {
  double sigma = 1.0;
  std::uint64_t seed = 0;
  std::optional<double> band_limit_hz;  // low-pass cutoff; attenuates above
};

SampleBuffer generate_white_noise(const WhiteNoiseSource& source, std::size_t n_samples,
                                  double sample_rate_hz);

}  // namespace anc
