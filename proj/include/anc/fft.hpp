#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace anc {

// In-place iterative radix-2 FFT. Size must be a power of two.
// Inverse transform includes the 1/N normalization.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse);

std::size_t next_power_of_two(std::size_t n);

}  // namespace anc
