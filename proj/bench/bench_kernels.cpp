// Timing comparison of the OpenMP batch kernels against their serial
// references, plus a bitwise-identity check on the outputs.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "anc/fir.hpp"
#include "anc/noise.hpp"
#include "anc/spectrum.hpp"

using namespace anc;

namespace {

template <typename F>
double time_ms(F&& fn, int reps) {
  // warm-up
  fn();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main() {
  const double fs = 5000.0;
  WhiteNoiseSource src;
  src.sigma = 1.0;
  src.seed = 42;

  std::printf("%-28s %12s %12s %8s %s\n", "kernel", "serial_ms", "parallel_ms", "speedup",
              "bitwise");

  for (std::size_t n : {100000ul, 1000000ul}) {
    const SampleBuffer x = generate_white_noise(src, n, fs);
    FirFilter filt = design_lowpass(129, 1000.0, fs);

    SampleBuffer ys, yp;
    const double ts = time_ms([&] { ys = fir_apply_serial(filt, x); }, 5);
    const double tp = time_ms([&] { yp = fir_apply(filt, x); }, 5);
    char name[64];
    std::snprintf(name, sizeof(name), "fir_apply n=%zu", n);
    std::printf("%-28s %12.3f %12.3f %8.2fx %s\n", name, ts, tp, ts / tp,
                bitwise_equal(ys.samples, yp.samples) ? "yes" : "NO");

    WelchParams wp;
    SpectrumEstimate ps, pp;
    const double ws = time_ms([&] { ps = welch_psd_serial(x, wp); }, 5);
    const double wpms = time_ms([&] { pp = welch_psd(x, wp); }, 5);
    std::snprintf(name, sizeof(name), "welch_psd n=%zu", n);
    std::printf("%-28s %12.3f %12.3f %8.2fx %s\n", name, ws, wpms, ws / wpms,
                bitwise_equal(ps.value, pp.value) ? "yes" : "NO");
  }
  return 0;
}
