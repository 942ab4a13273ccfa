// Command-line front end: sp-estimate / run / coherence.
//
// Exit codes: 0 success, 2 usage or config error, 3 numerical divergence,
// 4 I/O error.
//
// Config values can be overridden from the environment with ANC_-prefixed
// dotted-path keys, e.g. ANC_sim.master_seed=7 or ANC_environment.echo_coupling=0.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anc/config.hpp"
#include "anc/io.hpp"
#include "anc/orchestrator.hpp"

namespace fs = std::filesystem;
using namespace anc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int verbosity = 1;  // 0 quiet, 1 normal, 2 verbose
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Config file (defaults used when omitted)");
  cmd->add_option("--out", args.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "Master seed override")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_flag_callback("-v,--verbose", [&args] { args.verbosity = 2; }, "Verbose progress");
  cmd->add_flag_callback("-q,--quiet", [&args] { args.verbosity = 0; }, "Suppress progress");
}

ExperimentConfig load_config(const CommonArgs& args) {
  ExperimentConfig cfg = args.config_path.empty() ? parse_config_text("")
                                                  : parse_config_file(args.config_path);
  if (args.seed_set) cfg.master_seed = args.seed;
  return cfg;
}

void info(const CommonArgs& args, const std::string& msg) {
  if (args.verbosity >= 1) std::fprintf(stderr, "%s\n", msg.c_str());
}

void detail(const CommonArgs& args, const std::string& msg) {
  if (args.verbosity >= 2) std::fprintf(stderr, "%s\n", msg.c_str());
}

std::string provenance(const ExperimentConfig& cfg) {
  return "config_hash=" + cfg.config_hash() + " seed=" + std::to_string(cfg.master_seed);
}

struct Manifest {
  std::vector<std::string> lines;
  std::vector<std::string> files;

  void add_kv(const std::string& key, const std::string& value) {
    lines.push_back(key + ": " + value);
  }
  void add_file(const fs::path& p) { files.push_back(p.filename().string()); }
  void write(const fs::path& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open for writing: " + path.string());
    for (const std::string& l : lines) std::fprintf(f, "%s\n", l.c_str());
    std::fprintf(f, "files:\n");
    for (const std::string& file : files) std::fprintf(f, "  %s\n", file.c_str());
    std::fclose(f);
  }
};

Manifest make_manifest(const ExperimentConfig& cfg, const std::string& command) {
  Manifest m;
  m.add_kv("format_version", "1");
  m.add_kv("command", command);
  m.add_kv("config_hash", cfg.config_hash());
  m.add_kv("master_seed", std::to_string(cfg.master_seed));
  m.add_kv("sample_rate_hz", std::to_string(cfg.sample_rate_hz));
  m.add_kv("filter_taps", std::to_string(cfg.filter_taps));
  return m;
}

void write_sp_outputs(const fs::path& out, const ExperimentConfig& cfg, const SpStageResult& sp,
                      Manifest& manifest) {
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const fs::path model_path = out / (std::string("model_") + kAxisNames[axis] + ".txt");
    save_model(model_path, sp.models[axis]);
    manifest.add_file(model_path);
  }
  const fs::path taps_path = out / "sp_taps.csv";
  std::FILE* f = std::fopen(taps_path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + taps_path.string());
  std::fprintf(f, "# %s\n", provenance(cfg).c_str());
  std::fprintf(f, "tap,coeff_x,coeff_y,coeff_z\n");
  for (std::size_t i = 0; i < cfg.filter_taps; ++i) {
    std::fprintf(f, "%zu,%.9g,%.9g,%.9g\n", i, sp.models[0].coefficients[i],
                 sp.models[1].coefficients[i], sp.models[2].coefficients[i]);
  }
  std::fclose(f);
  manifest.add_file(taps_path);

  for (std::size_t axis = 0; axis < 3; ++axis) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "dc_offset_%s", kAxisNames[axis]);
    char val[64];
    std::snprintf(val, sizeof(val), "%.17g", sp.dc_offsets[axis]);
    manifest.add_kv(buf, val);
  }
}

void write_spectrum_csv(const fs::path& path, const SpectrumEstimate& psd,
                        const ExperimentConfig& cfg) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path.string());
  std::fprintf(f, "# %s\n", provenance(cfg).c_str());
  std::fprintf(f, "frequency_hz,asd_nt_per_sqrt_hz\n");
  for (std::size_t k = 0; k < psd.bins(); ++k) {
    std::fprintf(f, "%.9g,%.9g\n", psd.frequency_hz[k], std::sqrt(psd.value[k]));
  }
  std::fclose(f);
}

SampleBuffer decimate(const SampleBuffer& buf, std::size_t factor) {
  SampleBuffer out;
  out.sample_rate_hz = buf.sample_rate_hz / static_cast<double>(factor);
  for (std::size_t i = 0; i < buf.samples.size(); i += factor) out.samples.push_back(buf.samples[i]);
  return out;
}

void write_stage_outputs(const fs::path& out, const std::string& stage, const StageStreams& streams,
                         const ExperimentConfig& cfg, Manifest& manifest) {
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const std::string base = stage + "_" + kAxisNames[axis];
    const fs::path err_path = out / (base + "_error.ancb");
    const fs::path ref_path = out / (base + "_reference.ancb");
    write_sample_buffer(err_path, streams.error[axis]);
    write_sample_buffer(ref_path, streams.reference[axis]);
    manifest.add_file(err_path);
    manifest.add_file(ref_path);

    const SpectrumEstimate psd = welch_psd(tail_window(streams.error[axis], cfg.measure_s),
                                           cfg.welch);
    const fs::path spec_path = out / ("spectrum_" + base + ".csv");
    write_spectrum_csv(spec_path, psd, cfg);
    manifest.add_file(spec_path);

    // plot-rate (decimated) time trace of the error sensor
    const fs::path tt_path = out / ("timetrace_" + base + ".csv");
    write_sample_buffer_csv(tt_path, decimate(streams.error[axis], 10), provenance(cfg));
    manifest.add_file(tt_path);
  }
}

int cmd_sp_estimate(const CommonArgs& args) {
  const ExperimentConfig cfg = load_config(args);
  fs::create_directories(args.out_dir);
  info(args, "sp-estimate: seed " + std::to_string(cfg.master_seed) + ", " +
                 std::to_string(cfg.duration_sp_s) + " s per axis");
  const SpStageResult sp = run_sp_stage(cfg);
  Manifest manifest = make_manifest(cfg, "sp-estimate");
  write_sp_outputs(args.out_dir, cfg, sp, manifest);
  for (std::size_t axis = 0; axis < 3; ++axis) {
    detail(args, std::string("axis ") + kAxisNames[axis] +
                     ": residual power " + std::to_string(sp.models[axis].residual_power));
  }
  manifest.write(fs::path(args.out_dir) / "manifest.txt");
  info(args, "sp-estimate: wrote models to " + args.out_dir);
  return kExitOk;
}

int cmd_run(const CommonArgs& args, const std::vector<std::string>& stages) {
  const ExperimentConfig cfg = load_config(args);
  bool want_raw = false, want_pid = false, want_anc = false;
  for (const std::string& s : stages) {
    if (s == "raw") want_raw = true;
    else if (s == "pid") want_pid = true;
    else if (s == "anc") want_anc = true;
    else throw CLI::ValidationError("--stages", "unknown stage '" + s + "'");
  }
  if (!want_raw) throw CLI::ValidationError("--stages", "the raw stage is required (report baseline)");

  fs::create_directories(args.out_dir);
  Manifest manifest = make_manifest(cfg, "run");

  info(args, "run: secondary-path identification");
  const SpStageResult sp = run_sp_stage(cfg);
  write_sp_outputs(args.out_dir, cfg, sp, manifest);

  info(args, "run: raw-noise baseline");
  const StageStreams raw = run_raw_stage(cfg, sp.dc_offsets);
  write_stage_outputs(args.out_dir, "noise", raw, cfg, manifest);

  std::optional<StageStreams> pid;
  if (want_pid) {
    info(args, "run: PID baseline");
    pid = run_pid_baseline(cfg, sp.dc_offsets);
    write_stage_outputs(args.out_dir, "pid", *pid, cfg, manifest);
  }

  std::optional<AncStageResult> anc;
  if (want_anc) {
    info(args, "run: FxLMS (phase 1 sequential, phase 2 simultaneous)");
    anc = run_anc_stage(cfg, sp);
    write_stage_outputs(args.out_dir, "anc", anc->phase2, cfg, manifest);
    write_stage_outputs(args.out_dir, "anc_phase1", anc->phase1, cfg, manifest);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "convergence_phase1_%s_s", kAxisNames[axis]);
      char val[32];
      std::snprintf(val, sizeof(val), "%.6g", anc->phase1_convergence_s[axis]);
      manifest.add_kv(buf, val);
      std::snprintf(buf, sizeof(buf), "convergence_phase2_%s_s", kAxisNames[axis]);
      std::snprintf(val, sizeof(val), "%.6g", anc->phase2_convergence_s[axis]);
      manifest.add_kv(buf, val);
      std::snprintf(buf, sizeof(buf), "mu_anc_%s", kAxisNames[axis]);
      std::snprintf(val, sizeof(val), "%.17g", anc->mu_anc[axis]);
      manifest.add_kv(buf, val);
    }
  }

  const RunReport report = build_report(raw, pid ? &*pid : nullptr,
                                        anc ? &anc->phase2 : nullptr, cfg);
  const fs::path report_path = fs::path(args.out_dir) / "report.csv";
  write_report_csv(report_path, report);
  manifest.add_file(report_path);
  const fs::path coh_path = fs::path(args.out_dir) / "coherence.csv";
  write_coherence_csv(coh_path, report);
  manifest.add_file(coh_path);

  manifest.write(fs::path(args.out_dir) / "manifest.txt");
  info(args, "run: wrote report to " + report_path.string());
  return kExitOk;
}

int cmd_coherence(const CommonArgs& args, const std::vector<double>& level_override) {
  const ExperimentConfig cfg = load_config(args);
  const std::vector<double>& levels = level_override.empty() ? cfg.scan_levels : level_override;
  if (levels.empty()) {
    std::fprintf(stderr, "coherence: empty contamination level list\n");
    return kExitUsage;
  }
  fs::create_directories(args.out_dir);
  Manifest manifest = make_manifest(cfg, "coherence");

  info(args, "coherence: secondary-path identification");
  const SpStageResult sp = run_sp_stage(cfg);
  info(args, "coherence: scanning " + std::to_string(levels.size()) + " contamination levels");
  const std::vector<CoherenceScanRow> rows = coherence_scan(cfg, sp, levels);

  const fs::path scan_path = fs::path(args.out_dir) / "scan.csv";
  std::FILE* f = std::fopen(scan_path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + scan_path.string());
  std::fprintf(f, "# %s\n", provenance(cfg).c_str());
  std::fprintf(f, "level,axis,contamination_sigma_nt,gamma_sq_at_target,alpha_db_at_target,"
                  "mean_gamma_inband,achieved_supp_db\n");
  for (const CoherenceScanRow& row : rows) {
    for (std::size_t axis = 0; axis < 3; ++axis) {
      std::fprintf(f, "%.6g,%s,%.9g,%.9g,%.9g,%.9g,%.9g\n", row.level, kAxisNames[axis],
                   row.contamination_sigma_nt[axis], row.gamma_sq_at_target[axis],
                   row.alpha_db_at_target[axis], row.mean_gamma_inband[axis],
                   row.achieved_supp_db[axis]);
    }
  }
  std::fclose(f);
  manifest.add_file(scan_path);

  for (std::size_t li = 0; li < rows.size(); ++li) {
    char name[64];
    std::snprintf(name, sizeof(name), "coherence_level%zu.csv", li);
    const fs::path p = fs::path(args.out_dir) / name;
    std::FILE* cf = std::fopen(p.c_str(), "w");
    if (!cf) throw IoError("cannot open for writing: " + p.string());
    std::fprintf(cf, "# %s level=%.6g\n", provenance(cfg).c_str(), rows[li].level);
    std::fprintf(cf, "frequency_hz,gamma_sq_x,alpha_db_x,gamma_sq_y,alpha_db_y,"
                     "gamma_sq_z,alpha_db_z\n");
    const SpectrumEstimate& ref = rows[li].gamma_spectrum[0];
    for (std::size_t k = 0; k < ref.bins(); ++k) {
      std::fprintf(cf, "%.9g", ref.frequency_hz[k]);
      for (std::size_t axis = 0; axis < 3; ++axis) {
        const double g = rows[li].gamma_spectrum[axis].value[k];
        const double a = -10.0 * std::log10(std::max(1.0 - g, 1e-30));
        std::fprintf(cf, ",%.9g,%.9g", g, std::min(a, kCancellationCeilingDb));
      }
      std::fprintf(cf, "\n");
    }
    std::fclose(cf);
    manifest.add_file(p);
  }

  manifest.write(fs::path(args.out_dir) / "manifest.txt");
  info(args, "coherence: wrote scan table to " + scan_path.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3-axis magnetic active-noise-control pipeline"};
  app.require_subcommand(1);

  CommonArgs sp_args, run_args, coh_args;
  std::vector<std::string> run_stages = {"raw", "pid", "anc"};
  std::vector<double> coh_levels;

  CLI::App* sp_cmd = app.add_subcommand("sp-estimate", "Identify the secondary paths");
  add_common(sp_cmd, sp_args);

  CLI::App* run_cmd = app.add_subcommand("run", "Raw / PID / ANC stages plus report");
  add_common(run_cmd, run_args);
  run_cmd->add_option("--stages", run_stages, "Subset of raw,pid,anc")
      ->delimiter(',')
      ->capture_default_str();

  CLI::App* coh_cmd = app.add_subcommand("coherence", "Reference-contamination scan");
  add_common(coh_cmd, coh_args);
  coh_cmd->add_option("--levels", coh_levels, "Contamination levels (multiples of calibrated sigma)")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sp_cmd->parsed()) return cmd_sp_estimate(sp_args);
    if (run_cmd->parsed()) return cmd_run(run_args, run_stages);
    if (coh_cmd->parsed()) return cmd_coherence(coh_args, coh_levels);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kExitDivergence;
  } catch (const StageError& e) {
    std::fprintf(stderr, "stage failed: %s\n", e.what());
    return kExitDivergence;
  } catch (const PrenullError& e) {
    std::fprintf(stderr, "pre-null failed: %s\n", e.what());
    return kExitDivergence;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDivergence;
  }
  return kExitUsage;
}
