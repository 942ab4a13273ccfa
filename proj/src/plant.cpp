#include "anc/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace anc {

double quantize(double value, int bits, double range) {
  const double step = 2.0 * range / static_cast<double>(1ull << bits);
  double v = std::clamp(value, -range, range);
  return std::round(v / step) * step;
}

void validate(const ChannelConfig& cfg) {
  if (cfg.actuator_fir.empty()) throw std::invalid_argument("ChannelConfig: empty actuator FIR");
  if (cfg.aa_taps == 0) throw std::invalid_argument("ChannelConfig: aa_taps must be >= 1");
  if (cfg.adc_bits < 8) throw std::invalid_argument("ChannelConfig: adc_bits must be >= 8");
  if (!(cfg.adc_range_nt > 0.0)) throw std::invalid_argument("ChannelConfig: adc_range must be > 0");
  if (!(cfg.dac_limit > 0.0)) throw std::invalid_argument("ChannelConfig: dac_limit must be > 0");
  if (cfg.sensor_noise_floor_nt < 0.0) {
    throw std::invalid_argument("ChannelConfig: negative noise floor");
  }
}

SecondaryPathChannel::SecondaryPathChannel(const ChannelConfig& cfg, double sample_rate_hz,
                                           std::uint64_t seed, RngStream noise_stream)
    : cfg_(cfg),
      fs_(sample_rate_hz),
      actuator_(cfg.actuator_fir),
      aa_(design_lowpass(cfg.aa_taps, cfg.aa_cutoff_hz, sample_rate_hz).coefficients),
      delay_(cfg.extra_delay_samples, 0.0),
      noise_(seed, noise_stream) {
  validate(cfg);
}

double SecondaryPathChannel::step(double drive) {
  if (!std::isfinite(drive)) throw std::invalid_argument("plant step: non-finite drive");
  if (std::abs(drive) > cfg_.dac_limit) {
    saturated_ = true;
    drive = std::clamp(drive, -cfg_.dac_limit, cfg_.dac_limit);
  }
  double v = cfg_.dac_gain * drive;
  if (!delay_.empty()) {
    delay_.push_back(v);
    v = delay_.front();
    delay_.pop_front();
  }
  double field = aa_.push(actuator_.push(v));
  if (cfg_.noise_enabled && cfg_.sensor_noise_floor_nt > 0.0) {
    field += cfg_.sensor_noise_floor_nt * noise_.gaussian(tick_);
  }
  ++tick_;
  if (cfg_.quantization_enabled) field = quantize(field, cfg_.adc_bits, cfg_.adc_range_nt);
  return field;
}

std::vector<double> SecondaryPathChannel::composite_response() const {
  std::vector<double> h = convolve_coefficients(actuator_.coefficients(), aa_.coefficients());
  for (double& c : h) c *= cfg_.dac_gain;
  std::vector<double> out(cfg_.extra_delay_samples, 0.0);
  out.insert(out.end(), h.begin(), h.end());
  return out;
}

double SecondaryPathChannel::quantization_step() const {
  return 2.0 * cfg_.adc_range_nt / static_cast<double>(1ull << cfg_.adc_bits);
}

void validate(const EnvironmentConfig& cfg) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (cfg.crosstalk[i][i] != 1.0) {
      throw std::invalid_argument("EnvironmentConfig: crosstalk diagonal must be 1");
    }
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j && !(std::abs(cfg.crosstalk[i][j]) < 1.0)) {
        throw std::invalid_argument("EnvironmentConfig: off-diagonal crosstalk must be < 1");
      }
    }
  }
  if (!(cfg.echo_coupling >= 0.0) || !(cfg.echo_coupling < 1.0)) {
    throw std::invalid_argument("EnvironmentConfig: echo_coupling must be in [0,1)");
  }
  for (const ToneConfig& t : cfg.tones) {
    if (!(t.freq_hz > 0.0)) throw std::invalid_argument("EnvironmentConfig: tone frequency must be > 0");
  }
}

NoiseEnvironment::NoiseEnvironment(const EnvironmentConfig& cfg, double sample_rate_hz,
                                   std::uint64_t seed)
    : cfg_(cfg), fs_(sample_rate_hz) {
  validate(cfg);
  const RngStream streams[3] = {RngStream::EnvBroadbandX, RngStream::EnvBroadbandY,
                                RngStream::EnvBroadbandZ};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    rng_[axis] = CounterRng(seed, streams[axis]);
    const double sigma = cfg_.broadband.sigma_nt[axis];
    if (sigma <= 0.0) continue;
    switch (cfg_.broadband.shape) {
      case BroadbandShape::White:
        white_gain_[axis] = sigma;
        break;
      case BroadbandShape::OneOverFSquared: {
        const double a = std::exp(-2.0 * kPi * cfg_.broadband.corner_hz / fs_);
        shapers_[axis].push_back({a, sigma * std::sqrt(1.0 - a * a), 0.0});
        break;
      }
      case BroadbandShape::OneOverF: {
        // Equal-variance AR(1) sections at log-spaced corners; their summed
        // spectra stack into an approximate -10 dB/decade slope.
        std::vector<double> corners;
        for (double f = 0.7; f < fs_ / 4.0; f *= std::sqrt(10.0)) corners.push_back(f);
        const double v = sigma * sigma / static_cast<double>(corners.size());
        for (double f : corners) {
          const double a = std::exp(-2.0 * kPi * f / fs_);
          shapers_[axis].push_back({a, std::sqrt(v * (1.0 - a * a)), 0.0});
        }
        break;
      }
    }
  }
}

Vec3 NoiseEnvironment::step(std::uint64_t tick) {
  if (tick != expected_tick_) {
    throw std::logic_error("NoiseEnvironment: ticks must be consumed in order");
  }
  ++expected_tick_;
  const double t = static_cast<double>(tick) / fs_;
  Vec3 out = cfg_.dc_field_nt;
  for (const ToneConfig& tone : cfg_.tones) {
    const double drift = 1.0 + tone.amplitude_drift_per_s * t;
    for (std::size_t axis = 0; axis < 3; ++axis) {
      out[axis] += tone.amplitude_nt[axis] * drift *
                   std::sin(2.0 * kPi * tone.freq_hz * t + tone.phase_rad[axis]);
    }
  }
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const std::size_t nsec = shapers_[axis].size();
    if (white_gain_[axis] > 0.0) {
      out[axis] += white_gain_[axis] * rng_[axis].gaussian(tick);
    }
    for (std::size_t k = 0; k < nsec; ++k) {
      Ar1Section& s = shapers_[axis][k];
      const double w = rng_[axis].gaussian(tick * nsec + k);
      s.state = s.a * s.state + s.gain * w;
      out[axis] += s.state;
    }
  }
  return out;
}

ThreeAxisPlant::ThreeAxisPlant(const EnvironmentConfig& env_cfg,
                               const std::array<ChannelConfig, 3>& ch_cfg, double sample_rate_hz,
                               std::uint64_t seed)
    : env_(env_cfg, sample_rate_hz, seed),
      channels_{SecondaryPathChannel(ch_cfg[0], sample_rate_hz, seed, RngStream::ChannelNoiseX),
                SecondaryPathChannel(ch_cfg[1], sample_rate_hz, seed, RngStream::ChannelNoiseY),
                SecondaryPathChannel(ch_cfg[2], sample_rate_hz, seed, RngStream::ChannelNoiseZ)},
      fs_(sample_rate_hz),
      sensor_rng_(seed, RngStream::ErrorSensorNoise),
      contamination_rng_(seed, RngStream::ReferenceContamination) {
  const double fc = env_cfg.reference_contamination_center_hz;
  if (fc > 0.0) {
    if (fc >= fs_ / 2.0) {
      throw std::invalid_argument("contamination center must be below Nyquist");
    }
    const double bw = env_cfg.reference_contamination_bandwidth_hz;
    if (!(bw > 0.0)) throw std::invalid_argument("contamination bandwidth must be > 0");
    cont_a_ = std::exp(-2.0 * kPi * (bw / 2.0) / fs_);
    cont_gain_ = std::sqrt(1.0 - cont_a_ * cont_a_);
  }
}

SensorReading ThreeAxisPlant::sense(const Vec3& anti_noise_drive) {
  const Vec3 ambient = env_.step(tick_);
  Vec3 anti{};
  SensorReading reading;
  reading.tick = tick_;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    channels_[axis].clear_saturation();
    anti[axis] = channels_[axis].step(anti_noise_drive[axis]);
    reading.saturated[axis] = channels_[axis].saturated();
  }
  const EnvironmentConfig& env_cfg = env_.config();
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const ChannelConfig& ch = channels_[axis].config();
    double err = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      err += env_cfg.crosstalk[axis][j] * (ambient[j] + anti[j]);
    }
    if (ch.noise_enabled && ch.sensor_noise_floor_nt > 0.0) {
      err += ch.sensor_noise_floor_nt * sensor_rng_.gaussian(tick_ * 3 + axis);
    }
    double ref = ambient[axis] + env_cfg.echo_coupling * anti[axis];
    const double cont = env_cfg.reference_contamination_sigma_nt[axis];
    if (cont > 0.0) {
      const double f0 = env_cfg.reference_contamination_center_hz;
      if (f0 > 0.0) {
        const double wi = contamination_rng_.gaussian(tick_ * 6 + axis * 2);
        const double wq = contamination_rng_.gaussian(tick_ * 6 + axis * 2 + 1);
        cont_i_[axis] = cont_a_ * cont_i_[axis] + cont_gain_ * wi;
        cont_q_[axis] = cont_a_ * cont_q_[axis] + cont_gain_ * wq;
        const double ph = 2.0 * kPi * f0 * static_cast<double>(tick_) / fs_;
        ref += cont * (cont_i_[axis] * std::cos(ph) + cont_q_[axis] * std::sin(ph));
      } else {
        ref += cont * contamination_rng_.gaussian(tick_ * 3 + axis);
      }
    }
    if (ch.quantization_enabled) {
      err = quantize(err, ch.adc_bits, ch.adc_range_nt);
      ref = quantize(ref, ch.adc_bits, ch.adc_range_nt);
    }
    reading.error_sensor_nt[axis] = err;
    reading.reference_sensor_nt[axis] = ref;
  }
  ++tick_;
  return reading;
}

std::vector<double> ThreeAxisPlant::true_loop_response(std::size_t axis) const {
  // channel chain plus the one-tick controller latency of the loop
  std::vector<double> h = channels_[axis].composite_response();
  h.insert(h.begin(), 0.0);
  return h;
}

}  // namespace anc
