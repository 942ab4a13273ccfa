#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

#include "anc/fir.hpp"
#include "anc/rng.hpp"

namespace anc {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Mid-tread quantization, clipped at +-range.
double quantize(double value, int bits, double range);

// One axis of the hardware chain: DAC -> current source/coil -> sensor ->
// anti-alias filter -> ADC.
struct ChannelConfig {
  double dac_gain = 1.0;                        // V per drive unit
  std::vector<double> actuator_fir = {70.0, 30.0};  // nT per V, includes coil gain
  std::size_t aa_taps = 31;
  double aa_cutoff_hz = 1000.0;
  std::size_t extra_delay_samples = 5;
  double sensor_noise_floor_nt = 0.01;
  int adc_bits = 16;
  double adc_range_nt = 100000.0;
  double dac_limit = 1000.0;                    // drive clips beyond this
  bool quantization_enabled = true;
  bool noise_enabled = true;
};

void validate(const ChannelConfig& cfg);

class SecondaryPathChannel {
 public:
  SecondaryPathChannel(const ChannelConfig& cfg, double sample_rate_hz, std::uint64_t seed,
                       RngStream noise_stream = RngStream::Generic);

  // Advance one sample: output = quantize(aa(actuator(dac_gain * drive,
  // delayed)) + sensor noise). Drive past the DAC limit clips and sets the
  // saturation flag.
  double step(double drive);

  // Composite impulse response (delay + actuator + anti-alias), no loop tick.
  std::vector<double> composite_response() const;
  double quantization_step() const;
  bool saturated() const { return saturated_; }
  void clear_saturation() { saturated_ = false; }
  const ChannelConfig& config() const { return cfg_; }

 private:
  ChannelConfig cfg_;
  double fs_ = 0.0;
  StreamingFir actuator_;
  StreamingFir aa_;
  std::deque<double> delay_;
  CounterRng noise_;
  std::uint64_t tick_ = 0;
  bool saturated_ = false;
};

struct ToneConfig {
  double freq_hz = 50.0;
  Vec3 amplitude_nt{};          // per axis
  Vec3 phase_rad{};
  double amplitude_drift_per_s = 0.0;  // relative drift rate
};

enum class BroadbandShape { White, OneOverF, OneOverFSquared };

struct BroadbandConfig {
  BroadbandShape shape = BroadbandShape::OneOverFSquared;
  Vec3 sigma_nt{};
  double corner_hz = 0.5;
};

struct EnvironmentConfig {
  Vec3 dc_field_nt{};
  std::vector<ToneConfig> tones;
  BroadbandConfig broadband;
  Mat3 crosstalk = {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  double echo_coupling = 0.02;  // fraction of anti-noise seen by the reference sensor
  Vec3 reference_contamination_sigma_nt{};
  // 0 = white contamination; > 0 = narrowband contamination centered here,
  // with quadrature AR(1) envelopes of the given bandwidth.
  double reference_contamination_center_hz = 0.0;
  // Wide enough that the envelope decorrelates faster than the adaptive
  // filter can track it, so the contamination behaves like true incoherence.
  double reference_contamination_bandwidth_hz = 16.0;
};

void validate(const EnvironmentConfig& cfg);

// 3-axis ambient field generator: DC Earth field, AC line tones, colored
// broadband noise. Deterministic for a fixed seed; ticks must be consumed in
// order because the shaping filters carry state.
class NoiseEnvironment {
 public:
  NoiseEnvironment(const EnvironmentConfig& cfg, double sample_rate_hz, std::uint64_t seed);

  Vec3 step(std::uint64_t tick);
  const EnvironmentConfig& config() const { return cfg_; }

 private:
  struct Ar1Section {
    double a = 0.0;      // pole
    double gain = 0.0;   // input scaling
    double state = 0.0;
  };

  EnvironmentConfig cfg_;
  double fs_;
  std::array<std::vector<Ar1Section>, 3> shapers_;
  std::array<CounterRng, 3> rng_;
  std::array<double, 3> white_gain_{};  // direct white component, for White shape
  std::uint64_t expected_tick_ = 0;
};

struct SensorReading {
  Vec3 error_sensor_nt{};
  Vec3 reference_sensor_nt{};
  std::uint64_t tick = 0;
  std::array<bool, 3> saturated{};
};

// Environment plus three secondary-path channels advancing in lockstep.
// error  = crosstalk * (ambient + anti_noise) + sensor noise, quantized;
// reference = ambient + echo * anti_noise + contamination, quantized.
class ThreeAxisPlant {
 public:
  ThreeAxisPlant(const EnvironmentConfig& env_cfg, const std::array<ChannelConfig, 3>& ch_cfg,
                 double sample_rate_hz, std::uint64_t seed);

  SensorReading sense(const Vec3& anti_noise_drive);

  std::uint64_t tick() const { return tick_; }
  SecondaryPathChannel& channel(std::size_t axis) { return channels_[axis]; }
  const SecondaryPathChannel& channel(std::size_t axis) const { return channels_[axis]; }
  const EnvironmentConfig& environment_config() const { return env_.config(); }
  double sample_rate_hz() const { return fs_; }

  // Expected identification target for one axis: loop tick + channel chain.
  std::vector<double> true_loop_response(std::size_t axis) const;

 private:
  NoiseEnvironment env_;
  std::array<SecondaryPathChannel, 3> channels_;
  double fs_;
  CounterRng sensor_rng_;
  CounterRng contamination_rng_;
  double cont_a_ = 0.0;     // narrowband envelope pole
  double cont_gain_ = 0.0;  // unit-variance envelope input gain
  std::array<double, 3> cont_i_{};
  std::array<double, 3> cont_q_{};
  std::uint64_t tick_ = 0;
};

}  // namespace anc
