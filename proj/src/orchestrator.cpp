#include "anc/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "anc/io.hpp"
#include "anc/noise.hpp"

namespace anc {

namespace {

ThreeAxisPlant make_plant(const ExperimentConfig& cfg) {
  return ThreeAxisPlant(cfg.environment, cfg.channels, cfg.sample_rate_hz, cfg.master_seed);
}

PidGains pid_gains(const ExperimentConfig& cfg) {
  PidGains g;
  g.kp = cfg.pid_kp;
  g.ki = cfg.pid_ki;
  g.kd = cfg.pid_kd;
  g.output_limit = cfg.pid_output_limit;
  g.dt_s = 1.0 / cfg.sample_rate_hz;
  return g;
}

PrenullOptions prenull_options(const ExperimentConfig& cfg) {
  PrenullOptions opts;
  opts.threshold_nt = cfg.prenull_threshold_nt;
  opts.hold_s = cfg.prenull_hold_s;
  opts.timeout_s = cfg.prenull_timeout_s;
  return opts;
}

// One-pole DC blocker for the FxLMS reference input: the reference sensor sees
// the full Earth field, and an un-removed DC term would put the largest
// correlation eigenvalue far past the stable step-size range.
struct DcBlocker {
  double mean = 0.0;
  double alpha = 0.0;
  double step(double x) {
    mean += alpha * (x - mean);
    return x - mean;
  }
};

// Low enough that the slow ambient wander still reaches the adaptive filter:
// the secondary-path delay is a few milliseconds, so cancellation works down
// to the blocker corner.
constexpr double kDcBlockerCutoffHz = 0.05;

struct StreamRecorder {
  StageStreams streams;
  explicit StreamRecorder(double fs) {
    for (std::size_t a = 0; a < 3; ++a) {
      streams.error[a].sample_rate_hz = fs;
      streams.reference[a].sample_rate_hz = fs;
    }
  }
  void record(const SensorReading& rd) {
    for (std::size_t a = 0; a < 3; ++a) {
      streams.error[a].samples.push_back(rd.error_sensor_nt[a]);
      streams.reference[a].samples.push_back(rd.reference_sensor_nt[a]);
    }
  }
};

struct AncEngine {
  ExperimentConfig cfg;
  ThreeAxisPlant plant;
  Vec3 dc;
  std::array<std::optional<FxLms>, 3> fx;
  std::array<DcBlocker, 3> hp;
  Vec3 mu_anc{};

  // taps_override > 0 swaps in a longer anti-noise filter than the
  // secondary-path model (finer frequency resolution for scan runs).
  AncEngine(const ExperimentConfig& cfg_in, const SpStageResult& sp,
            std::size_t taps_override = 0)
      : cfg(cfg_in), plant(make_plant(cfg_in)), dc(sp.dc_offsets) {
    const std::size_t wtaps = taps_override > 0 ? taps_override : cfg.filter_taps;
    const double fs = cfg.sample_rate_hz;
    const std::size_t ncal = static_cast<std::size_t>(cfg.calibration_s * fs);

    // Calibration window: measure the reference mean and the filtered-reference
    // power that sets the stable step-size range.
    std::array<std::vector<double>, 3> ref;
    for (std::size_t n = 0; n < ncal; ++n) {
      const SensorReading rd = plant.sense(dc);
      for (std::size_t a = 0; a < 3; ++a) ref[a].push_back(rd.reference_sensor_nt[a]);
    }
    for (std::size_t a = 0; a < 3; ++a) {
      const double m = mean(ref[a]);
      hp[a].mean = m;
      hp[a].alpha = 2.0 * kPi * kDcBlockerCutoffHz / fs;

      SampleBuffer x_hp;
      x_hp.sample_rate_hz = fs;
      for (double v : ref[a]) x_hp.samples.push_back(v - m);
      const FirFilter c{sp.models[a].coefficients};
      const SampleBuffer xf = fir_apply(c, x_hp);
      // skip the filter fill-in when estimating power
      double acc = 0.0;
      std::size_t cnt = 0;
      for (std::size_t i = xf.samples.size() / 2; i < xf.samples.size(); ++i) {
        acc += xf.samples[i] * xf.samples[i];
        ++cnt;
      }
      const double p_xf = cnt > 0 ? acc / static_cast<double>(cnt) : 1.0;
      mu_anc[a] = cfg.mu_anc_safety * stability_bound(wtaps, p_xf);
      SecondaryPathModel model = sp.models[a];
      fx[a].emplace(std::move(model), mu_anc[a], wtaps);
    }
  }

  // Advance one tick with the given set of actively driving axes. Reference
  // histories stay current for every axis so later phases warm-start cleanly.
  // adapt=false freezes the weights while the active axes keep driving.
  SensorReading step(const std::array<bool, 3>& active, const std::string& phase,
                     bool adapt = true) {
    Vec3 drive = dc;
    for (std::size_t a = 0; a < 3; ++a) {
      if (active[a]) drive[a] += fx[a]->compute_antinoise();
    }
    const SensorReading rd = plant.sense(drive);
    for (std::size_t a = 0; a < 3; ++a) {
      const double x = hp[a].step(rd.reference_sensor_nt[a]);
      fx[a]->filter_reference(x);
      if (active[a] && adapt) {
        try {
          fx[a]->update(rd.error_sensor_nt[a]);
        } catch (const DivergenceError& e) {
          throw StageError(e.what(), a, phase);
        }
      }
    }
    return rd;
  }
};

SpectrumEstimate tail_psd(const SampleBuffer& buf, const ExperimentConfig& cfg) {
  return welch_psd(tail_window(buf, cfg.measure_s), cfg.welch);
}

}  // namespace

SampleBuffer tail_window(const SampleBuffer& buf, double seconds) {
  const std::size_t n = static_cast<std::size_t>(seconds * buf.sample_rate_hz);
  SampleBuffer out;
  out.sample_rate_hz = buf.sample_rate_hz;
  if (n >= buf.samples.size()) {
    out.samples = buf.samples;
  } else {
    out.samples.assign(buf.samples.end() - static_cast<std::ptrdiff_t>(n), buf.samples.end());
  }
  return out;
}

std::optional<double> convergence_time_s(const SampleBuffer& error_stream, double window_s,
                                         double rel_tolerance) {
  const std::size_t wlen = static_cast<std::size_t>(window_s * error_stream.sample_rate_hz);
  if (wlen == 0 || error_stream.samples.size() < 2 * wlen) return std::nullopt;
  for (std::size_t end = 2 * wlen; end <= error_stream.samples.size(); end += wlen) {
    SampleBuffer prefix;
    prefix.sample_rate_hz = error_stream.sample_rate_hz;
    prefix.samples.assign(error_stream.samples.begin(),
                          error_stream.samples.begin() + static_cast<std::ptrdiff_t>(end));
    if (detect_convergence(prefix, window_s, rel_tolerance)) {
      return static_cast<double>(end) / error_stream.sample_rate_hz;
    }
  }
  return std::nullopt;
}

SpStageResult run_sp_stage(const ExperimentConfig& cfg) {
  SpStageResult result;
  ThreeAxisPlant plant = make_plant(cfg);
  result.dc_offsets = dc_prenull(plant, pid_gains(cfg), prenull_options(cfg));

  const double fs = cfg.sample_rate_hz;
  const std::size_t ncal = static_cast<std::size_t>(cfg.calibration_s * fs);

  for (std::size_t axis = 0; axis < 3; ++axis) {
    WhiteNoiseSource noise;
    noise.sigma = cfg.sp_drive_sigma;
    noise.seed = cfg.master_seed ^ (0x5350ull + axis);

    // Drive power estimated over the calibration window (Eq. 11 bound input).
    CounterRng probe(noise.seed, RngStream::SpDrive);
    double p_y = 0.0;
    for (std::size_t i = 0; i < ncal; ++i) {
      const double y = noise.sigma * probe.gaussian(i);
      p_y += y * y;
    }
    p_y /= static_cast<double>(ncal);
    const double mu_sp = cfg.mu_sp_safety * stability_bound(cfg.filter_taps, p_y);

    // The white sample generated this step is applied on the next tick, so the
    // recovered model includes the one-tick controller latency of the loop.
    double pending = 0.0;
    auto plant_cb = [&](double y) {
      Vec3 drive = result.dc_offsets;
      drive[axis] += pending;
      pending = y;
      return plant.sense(drive).error_sensor_nt[axis];
    };

    SpEstimateOptions opts;
    opts.dc_threshold = cfg.sp_dc_threshold_nt;
    try {
      result.models[axis] = estimate_secondary_path(plant_cb, noise, cfg.filter_taps, mu_sp,
                                                    cfg.duration_sp_s, fs, opts);
    } catch (const DivergenceError& e) {
      throw StageError(e.what(), axis, "sp-estimate");
    }
    result.true_responses[axis] = plant.true_loop_response(axis);
  }
  return result;
}

StageStreams run_raw_stage(const ExperimentConfig& cfg, const Vec3& dc_offsets) {
  ThreeAxisPlant plant = make_plant(cfg);
  StreamRecorder rec(cfg.sample_rate_hz);
  const std::size_t n = static_cast<std::size_t>(cfg.duration_anc_s * cfg.sample_rate_hz);
  for (std::size_t i = 0; i < n; ++i) rec.record(plant.sense(dc_offsets));
  return std::move(rec.streams);
}

StageStreams run_pid_baseline(const ExperimentConfig& cfg, const Vec3& dc_offsets) {
  ThreeAxisPlant plant = make_plant(cfg);
  StreamRecorder rec(cfg.sample_rate_hz);
  const PidGains gains = pid_gains(cfg);
  std::array<PidState, 3> state{};
  Vec3 drive = dc_offsets;
  const std::size_t n = static_cast<std::size_t>(cfg.duration_anc_s * cfg.sample_rate_hz);
  const std::size_t wlen = static_cast<std::size_t>(cfg.convergence_window_s * cfg.sample_rate_hz);
  double first_window_rms = 0.0;
  double window_acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const SensorReading rd = plant.sense(drive);
    rec.record(rd);
    for (std::size_t a = 0; a < 3; ++a) {
      const PidResult r = pid_step(gains, state[a], -rd.error_sensor_nt[a]);
      state[a] = r.state;
      drive[a] = dc_offsets[a] + r.output;
      window_acc += rd.error_sensor_nt[a] * rd.error_sensor_nt[a];
    }
    if (wlen > 0 && (i + 1) % wlen == 0) {
      const double wrms = std::sqrt(window_acc / static_cast<double>(3 * wlen));
      window_acc = 0.0;
      if (first_window_rms == 0.0) {
        first_window_rms = wrms;
      } else if (wrms > 50.0 * first_window_rms) {
        throw StageError("pid baseline: error RMS growing without bound", 0, "pid");
      }
    }
  }
  return std::move(rec.streams);
}

AncStageResult run_anc_stage(const ExperimentConfig& cfg, const SpStageResult& sp) {
  AncStageResult result;
  AncEngine engine(cfg, sp);
  result.mu_anc = engine.mu_anc;
  const double fs = cfg.sample_rate_hz;
  const std::size_t wlen = static_cast<std::size_t>(cfg.convergence_window_s * fs);
  const std::size_t max_phase1 = static_cast<std::size_t>(cfg.convergence_max_phase_s * fs);

  // Phase 1: one axis at a time; each axis adapts until steady state, then is
  // switched off (weights kept) before the next axis starts.
  StreamRecorder rec1(fs);
  for (std::size_t axis = 0; axis < 3; ++axis) {
    std::array<bool, 3> active{};
    active[axis] = true;
    SampleBuffer axis_error;
    axis_error.sample_rate_hz = fs;
    std::size_t steps = 0;
    bool converged = false;
    while (steps < max_phase1) {
      const SensorReading rd = engine.step(active, "phase1");
      rec1.record(rd);
      axis_error.samples.push_back(rd.error_sensor_nt[axis]);
      ++steps;
      if (steps % wlen == 0 && axis_error.samples.size() >= 2 * wlen) {
        if (detect_convergence(axis_error, cfg.convergence_window_s,
                               cfg.convergence_rel_tolerance)) {
          converged = true;
          break;
        }
      }
    }
    result.phase1_convergence_s[axis] =
        converged ? static_cast<double>(steps) / fs : cfg.convergence_max_phase_s;
    result.weights_after_phase1[axis] = engine.fx[axis]->weights();
  }
  result.phase1 = std::move(rec1.streams);

  // Phase 2: all three axes simultaneously, warm-started.
  StreamRecorder rec2(fs);
  const std::array<bool, 3> all{true, true, true};
  const std::size_t n2 = static_cast<std::size_t>(cfg.duration_anc_s * fs);
  for (std::size_t i = 0; i < n2; ++i) rec2.record(engine.step(all, "phase2"));
  result.phase2 = std::move(rec2.streams);

  for (std::size_t axis = 0; axis < 3; ++axis) {
    result.weights_after_phase2[axis] = engine.fx[axis]->weights();
    const auto t = convergence_time_s(result.phase2.error[axis], cfg.convergence_window_s,
                                      cfg.convergence_rel_tolerance);
    result.phase2_convergence_s[axis] = t.value_or(cfg.duration_anc_s);
  }
  return result;
}

namespace {

void add_stage_rows(RunReport& report, const char* stage_name, const StageStreams& streams,
                    const std::array<SpectrumEstimate, 3>& raw_psd, const ExperimentConfig& cfg) {
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const SpectrumEstimate psd = tail_psd(streams.error[axis], cfg);
    const std::size_t bin50 = nearest_bin(psd, 50.0);
    const std::size_t bin150 = nearest_bin(psd, 150.0);

    // One-sided white-noise density of the sensor floor; a residual bin at or
    // below this is instrument-limited, not a cancellation measurement.
    const double floor_density = 2.0 * cfg.channels[axis].sensor_noise_floor_nt *
                                 cfg.channels[axis].sensor_noise_floor_nt / cfg.sample_rate_hz;
    auto tone_supp = [&](std::size_t bin, bool& floor_flag) {
      const double before = raw_psd[axis].value[bin];
      const double after = psd.value[bin];
      if (!(before > 0.0) || !(after > 0.0)) return 0.0;
      if (after <= 2.0 * floor_density) floor_flag = true;
      return 10.0 * std::log10(before / after);
    };

    ReportRow base;
    base.axis = kAxisNames[axis];
    base.stage = stage_name;
    base.supp_50hz_db = tone_supp(bin50, base.supp_50hz_floor_limited);
    base.supp_150hz_db = tone_supp(bin150, base.supp_150hz_floor_limited);

    for (const ReportBand& band : cfg.report_bands) {
      ReportRow row = base;
      row.band_lo_hz = band.f_lo_hz;
      row.band_hi_hz = band.f_hi_hz;
      row.rms_nt = rms_in_band(psd, band.f_lo_hz, band.f_hi_hz);
      row.rms_larmor_hz = field_rms_to_larmor_hz(row.rms_nt, cfg.gamma_hz_per_nt);
      report.rows.push_back(std::move(row));
    }
  }
}

}  // namespace

RunReport build_report(const StageStreams& raw, const StageStreams* pid, const StageStreams* anc,
                       const ExperimentConfig& cfg) {
  RunReport report;
  report.config_hash = cfg.config_hash();
  report.seed = cfg.master_seed;

  std::array<SpectrumEstimate, 3> raw_psd;
  for (std::size_t axis = 0; axis < 3; ++axis) {
    raw_psd[axis] = tail_psd(raw.error[axis], cfg);
    const SampleBuffer ref_tail = tail_window(raw.reference[axis], cfg.measure_s);
    const SampleBuffer err_tail = tail_window(raw.error[axis], cfg.measure_s);
    report.coherence_raw[axis] = coherence(ref_tail, err_tail, cfg.welch);
    report.alpha_db[axis] = max_cancellation_db(report.coherence_raw[axis]);
  }

  add_stage_rows(report, "noise", raw, raw_psd, cfg);
  if (pid != nullptr) add_stage_rows(report, "pid", *pid, raw_psd, cfg);
  if (anc != nullptr) add_stage_rows(report, "anc", *anc, raw_psd, cfg);
  return report;
}

void write_report_csv(const std::filesystem::path& path, const RunReport& report) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path.string());
  std::fprintf(f, "# config_hash=%s seed=%llu\n", report.config_hash.c_str(),
               static_cast<unsigned long long>(report.seed));
  std::fprintf(f, "axis,stage,band_lo_hz,band_hi_hz,rms_nt,rms_larmor_hz,supp_50hz_db,supp_150hz_db\n");
  for (const ReportRow& row : report.rows) {
    auto supp = [](double v, bool ceiling) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ceiling ? ">=%.6g" : "%.6g", v);
      return std::string(buf);
    };
    std::fprintf(f, "%s,%s,%.6g,%.6g,%.9g,%.9g,%s,%s\n", row.axis.c_str(), row.stage.c_str(),
                 row.band_lo_hz, row.band_hi_hz, row.rms_nt, row.rms_larmor_hz,
                 supp(row.supp_50hz_db, row.supp_50hz_floor_limited).c_str(),
                 supp(row.supp_150hz_db, row.supp_150hz_floor_limited).c_str());
  }
  std::fclose(f);
}

void write_coherence_csv(const std::filesystem::path& path, const RunReport& report) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path.string());
  std::fprintf(f, "# config_hash=%s seed=%llu\n", report.config_hash.c_str(),
               static_cast<unsigned long long>(report.seed));
  std::fprintf(f, "frequency_hz,gamma_sq_x,alpha_db_x,gamma_sq_y,alpha_db_y,gamma_sq_z,alpha_db_z\n");
  const SpectrumEstimate& ref = report.coherence_raw[0];
  for (std::size_t k = 0; k < ref.bins(); ++k) {
    std::fprintf(f, "%.9g", ref.frequency_hz[k]);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      std::fprintf(f, ",%.9g,%.9g", report.coherence_raw[axis].value[k],
                   report.alpha_db[axis].value[k]);
    }
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

Vec3 calibrate_contamination(const ExperimentConfig& cfg) {
  const std::size_t n = static_cast<std::size_t>(
      std::max(cfg.scan_measure_s, 10.0) * cfg.sample_rate_hz);

  // Contamination-free reference recording gives the coherent density at the
  // target bin. The drive is irrelevant beyond the (small) echo term.
  ExperimentConfig clean = cfg;
  clean.environment.reference_contamination_sigma_nt = {0.0, 0.0, 0.0};
  ThreeAxisPlant plant(clean.environment, clean.channels, clean.sample_rate_hz, clean.master_seed);
  StreamRecorder rec(cfg.sample_rate_hz);
  for (std::size_t i = 0; i < n; ++i) rec.record(plant.sense({0.0, 0.0, 0.0}));

  // Unit-sigma contamination alone (ambient and instrument effects off) gives
  // the contamination density per unit variance, whatever its shape.
  ExperimentConfig unit = cfg;
  unit.environment.dc_field_nt = {0.0, 0.0, 0.0};
  unit.environment.tones.clear();
  unit.environment.broadband.sigma_nt = {0.0, 0.0, 0.0};
  unit.environment.reference_contamination_sigma_nt = {1.0, 1.0, 1.0};
  unit.environment.reference_contamination_center_hz = cfg.scan_target_freq_hz;
  for (ChannelConfig& ch : unit.channels) {
    ch.noise_enabled = false;
    ch.quantization_enabled = false;
  }
  ThreeAxisPlant unit_plant(unit.environment, unit.channels, unit.sample_rate_hz,
                            unit.master_seed);
  StreamRecorder unit_rec(cfg.sample_rate_hz);
  for (std::size_t i = 0; i < n; ++i) unit_rec.record(unit_plant.sense({0.0, 0.0, 0.0}));

  Vec3 sigma{};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const SpectrumEstimate psd = welch_psd(rec.streams.reference[axis], cfg.welch);
    const SpectrumEstimate unit_psd = welch_psd(unit_rec.streams.reference[axis], cfg.welch);
    const std::size_t bin = nearest_bin(psd, cfg.scan_target_freq_hz);
    const double s_coh = psd.value[bin];
    const double d_unit = unit_psd.value[bin];
    const double g = cfg.scan_target_gamma_sq;
    if (!(d_unit > 0.0)) throw ConfigError("calibrate_contamination: zero contamination density");
    sigma[axis] = std::sqrt(std::max(s_coh * (1.0 / g - 1.0) / d_unit, 0.0));
  }
  return sigma;
}

namespace {

// Adapt for scan_duration_s, then freeze the weights and record the measured
// window. The coherence ceiling bounds time-invariant filters; a filter still
// adapting can track slow contamination structure and land above it.
StageStreams run_anc_simultaneous(const ExperimentConfig& cfg, const SpStageResult& sp) {
  AncEngine engine(cfg, sp, cfg.scan_filter_taps);
  StreamRecorder rec(cfg.sample_rate_hz);
  const std::array<bool, 3> all{true, true, true};
  const std::size_t n_adapt = static_cast<std::size_t>(cfg.scan_duration_s * cfg.sample_rate_hz);
  for (std::size_t i = 0; i < n_adapt; ++i) engine.step(all, "scan");
  const std::size_t n_meas = static_cast<std::size_t>(cfg.scan_measure_s * cfg.sample_rate_hz);
  for (std::size_t i = 0; i < n_meas; ++i) rec.record(engine.step(all, "scan", false));
  return std::move(rec.streams);
}

}  // namespace

std::vector<CoherenceScanRow> coherence_scan(const ExperimentConfig& cfg, const SpStageResult& sp,
                                             const std::vector<double>& levels) {
  if (levels.empty()) throw ConfigError("coherence_scan: empty level list");
  const Vec3 sigma_cal = calibrate_contamination(cfg);
  const ReportBand band = cfg.report_bands.empty() ? ReportBand{0.0, 1000.0} : cfg.report_bands[0];

  std::vector<CoherenceScanRow> rows;
  for (double level : levels) {
    CoherenceScanRow row;
    row.level = level;
    ExperimentConfig lc = cfg;
    lc.environment.reference_contamination_center_hz = cfg.scan_target_freq_hz;
    // cover the evaluation window plus a settling margin
    lc.duration_anc_s = cfg.scan_measure_s + 5.0;
    for (std::size_t axis = 0; axis < 3; ++axis) {
      row.contamination_sigma_nt[axis] = level * sigma_cal[axis];
      lc.environment.reference_contamination_sigma_nt[axis] = row.contamination_sigma_nt[axis];
    }
    const StageStreams raw = run_raw_stage(lc, sp.dc_offsets);
    const StageStreams anc = run_anc_simultaneous(lc, sp);

    for (std::size_t axis = 0; axis < 3; ++axis) {
      const SampleBuffer ref_tail = tail_window(raw.reference[axis], cfg.scan_measure_s);
      const SampleBuffer err_tail = tail_window(raw.error[axis], cfg.scan_measure_s);
      row.gamma_spectrum[axis] = coherence(ref_tail, err_tail, cfg.welch);
      row.raw_psd[axis] = welch_psd(err_tail, cfg.welch);
      row.anc_psd[axis] = welch_psd(tail_window(anc.error[axis], cfg.scan_measure_s), cfg.welch);

      const std::size_t bin = nearest_bin(row.gamma_spectrum[axis], cfg.scan_target_freq_hz);
      row.gamma_sq_at_target[axis] = row.gamma_spectrum[axis].value[bin];
      const SpectrumEstimate alpha = max_cancellation_db(row.gamma_spectrum[axis]);
      row.alpha_db_at_target[axis] = alpha.value[bin];
      row.achieved_supp_db[axis] =
          10.0 * std::log10(row.raw_psd[axis].value[bin] / row.anc_psd[axis].value[bin]);

      // power-weighted in-band mean: the coherent fraction of the in-band
      // error power, so noise-floor bins between the tones do not dominate
      double acc = 0.0;
      double wsum = 0.0;
      for (std::size_t k = 0; k < row.gamma_spectrum[axis].bins(); ++k) {
        const double f = row.gamma_spectrum[axis].frequency_hz[k];
        if (f > band.f_lo_hz && f <= band.f_hi_hz) {
          const double w = row.raw_psd[axis].value[k];
          acc += w * row.gamma_spectrum[axis].value[k];
          wsum += w;
        }
      }
      row.mean_gamma_inband[axis] = wsum > 0.0 ? acc / wsum : 0.0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace anc
