#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "anc/adaptive.hpp"
#include "anc/config.hpp"
#include "anc/pid.hpp"
#include "anc/plant.hpp"
#include "anc/spectrum.hpp"

namespace anc {

inline constexpr const char* kAxisNames[3] = {"x", "y", "z"};

struct StageError : std::runtime_error {
  StageError(const std::string& what, std::size_t axis, const std::string& phase)
      : std::runtime_error(what + " [axis " + kAxisNames[axis] + ", " + phase + "]"),
        axis(axis),
        phase(phase) {}
  std::size_t axis;
  std::string phase;
};

struct SpStageResult {
  std::array<SecondaryPathModel, 3> models;
  Vec3 dc_offsets{};
  // True channel responses (loop tick included), for accuracy diagnostics.
  std::array<std::vector<double>, 3> true_responses;
};

// DC pre-null, then sequential per-axis white-noise identification (x, y, z)
// with the PID off and the DC offsets held.
SpStageResult run_sp_stage(const ExperimentConfig& cfg);

struct StageStreams {
  std::array<SampleBuffer, 3> error;
  std::array<SampleBuffer, 3> reference;
};

struct AncStageResult {
  StageStreams phase1;  // sequential per-axis adaptation, full timeline
  StageStreams phase2;  // simultaneous 3-axis operation
  Vec3 phase1_convergence_s{};
  Vec3 phase2_convergence_s{};
  std::array<std::vector<double>, 3> weights_after_phase1;
  std::array<std::vector<double>, 3> weights_after_phase2;
  Vec3 mu_anc{};
};

// Phase 1: per-axis sequential FxLMS until convergence; phase 2: all three
// axes simultaneously, warm-started from phase 1.
AncStageResult run_anc_stage(const ExperimentConfig& cfg, const SpStageResult& sp);

// Error/reference recording with only the DC offsets driven.
StageStreams run_raw_stage(const ExperimentConfig& cfg, const Vec3& dc_offsets);

// Closed-loop PID on all three axes.
StageStreams run_pid_baseline(const ExperimentConfig& cfg, const Vec3& dc_offsets);

struct ReportRow {
  std::string axis;
  std::string stage;  // noise | pid | anc
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
  double rms_nt = 0.0;
  double rms_larmor_hz = 0.0;
  double supp_50hz_db = 0.0;
  double supp_150hz_db = 0.0;
  // Set when the residual bin sits at the sensor noise floor, i.e. the
  // suppression number is a lower bound set by the instrument.
  bool supp_50hz_floor_limited = false;
  bool supp_150hz_floor_limited = false;
};

struct RunReport {
  std::vector<ReportRow> rows;
  std::string config_hash;
  std::uint64_t seed = 0;
  // Coherence between raw reference and raw error streams, and the resulting
  // cancellation ceiling, per axis.
  std::array<SpectrumEstimate, 3> coherence_raw;
  std::array<SpectrumEstimate, 3> alpha_db;
};

// Pure function of the recorded streams: band RMS, Larmor conversion, tonal
// suppression at the 50/150 Hz bins, coherence and ceiling spectra.
RunReport build_report(const StageStreams& raw, const StageStreams* pid, const StageStreams* anc,
                       const ExperimentConfig& cfg);

void write_report_csv(const std::filesystem::path& path, const RunReport& report);
void write_coherence_csv(const std::filesystem::path& path, const RunReport& report);

struct CoherenceScanRow {
  double level = 0.0;
  Vec3 contamination_sigma_nt{};
  Vec3 gamma_sq_at_target{};
  Vec3 alpha_db_at_target{};
  Vec3 mean_gamma_inband{};
  Vec3 achieved_supp_db{};
  std::array<SpectrumEstimate, 3> gamma_spectrum;
  std::array<SpectrumEstimate, 3> raw_psd;
  std::array<SpectrumEstimate, 3> anc_psd;
};

// Per-axis contamination sigma such that gamma^2 at the target frequency bin
// equals target_gamma_sq (level 1.0 of the scan).
Vec3 calibrate_contamination(const ExperimentConfig& cfg);

// For each contamination level (multiples of the calibrated sigma), runs
// simultaneous ANC to convergence and tabulates achieved suppression against
// the coherence ceiling.
std::vector<CoherenceScanRow> coherence_scan(const ExperimentConfig& cfg,
                                             const SpStageResult& sp,
                                             const std::vector<double>& levels);

// Trailing seconds of a buffer (whole buffer if shorter).
SampleBuffer tail_window(const SampleBuffer& buf, double seconds);

// First time (seconds from stream start) at which detect_convergence passes
// on the prefix, or nullopt.
std::optional<double> convergence_time_s(const SampleBuffer& error_stream, double window_s,
                                         double rel_tolerance);

}  // namespace anc
