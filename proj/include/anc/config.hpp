#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "anc/plant.hpp"
#include "anc/spectrum.hpp"

namespace anc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReportBand {
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
};

// Full experiment description. Every field has a default; a config file (or
// ANC_-prefixed environment overrides) only needs to name what it changes.
struct ExperimentConfig {
  // [sim]
  double sample_rate_hz = 5000.0;
  std::uint64_t master_seed = 12345;
  std::size_t filter_taps = 128;
  double duration_sp_s = 20.0;
  double duration_anc_s = 60.0;
  double mu_sp_safety = 0.1;    // fraction of the 1/(M P) bound
  double mu_anc_safety = 0.01;
  double sp_drive_sigma = 200.0;  // white-noise drive units during identification
  double calibration_s = 1.0;     // power/mean measurement window

  // [environment]
  EnvironmentConfig environment;

  // [channel.x|y|z]
  std::array<ChannelConfig, 3> channels;

  // [pid]
  double pid_kp = 0.003;
  double pid_ki = 0.6;
  double pid_kd = 0.0;
  double pid_output_limit = 1000.0;

  // [prenull]
  double prenull_threshold_nt = 10.0;
  double prenull_hold_s = 1.0;
  double prenull_timeout_s = 30.0;

  // [sp]
  double sp_dc_threshold_nt = 2000.0;

  // [welch]
  WelchParams welch;

  // [report]
  std::vector<ReportBand> report_bands = {{0.0, 1000.0}, {0.0, 150.0}};
  double gamma_hz_per_nt = kCesiumGammaHzPerNt;
  double measure_s = 30.0;  // trailing window used for spectra and band RMS

  // [scan]
  std::vector<double> scan_levels = {0.0, 0.33, 1.0, 3.0};
  double scan_target_gamma_sq = 0.9;  // level 1.0 is calibrated to this
  double scan_target_freq_hz = 50.0;
  // Scan runs use a longer anti-noise filter so the controller's frequency
  // resolution matches the analysis bins; a short filter smears the
  // contaminated band and lands well under the coherence ceiling.
  std::size_t scan_filter_taps = 2048;
  double scan_duration_s = 40.0;
  // Frozen-weight evaluation window; long so the per-bin suppression and
  // coherence estimates have small enough variance to compare against each other
  double scan_measure_s = 90.0;

  // [convergence]
  double convergence_window_s = 1.0;
  // steady-state residual is broadband-dominated, so window RMS fluctuates
  // tens of percent even when fully converged
  double convergence_rel_tolerance = 0.5;
  double convergence_max_phase_s = 20.0;

  // Canonical text rendering; two configs hash equal iff they behave equal.
  std::string canonical_text() const;
  std::string config_hash() const;
};

ExperimentConfig default_config();

// Parses the key/value config format, applies ANC_-prefixed environment
// overrides (ANC_<section>.<key>=value), and rejects unknown keys.
ExperimentConfig parse_config_file(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

void write_config_file(const std::filesystem::path& path, const ExperimentConfig& cfg);

}  // namespace anc
