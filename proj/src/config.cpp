#include "anc/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "anc/io.hpp"

extern char** environ;

namespace anc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

using KvMap = std::map<std::string, std::map<std::string, std::string>>;

KvMap parse_kv(const std::string& text) {
  KvMap kv;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      kv[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    kv[section][key] = value;
  }
  return kv;
}

void apply_env_overrides(KvMap& kv) {
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    if (entry.rfind("ANC_", 0) != 0) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string path = entry.substr(4, eq - 4);
    const std::string value = entry.substr(eq + 1);
    const std::size_t dot = path.rfind('.');
    if (dot == std::string::npos) {
      throw ConfigError("environment override ANC_" + path + " is not a dotted path");
    }
    kv[path.substr(0, dot)][path.substr(dot + 1)] = value;
  }
}

class Reader {
 public:
  explicit Reader(KvMap kv) : kv_(std::move(kv)) {}

  bool has(const std::string& section, const std::string& key) const {
    auto s = kv_.find(section);
    return s != kv_.end() && s->second.count(key) > 0;
  }

  std::string get(const std::string& section, const std::string& key) {
    used_[section].insert(key);
    return kv_.at(section).at(key);
  }

  void scalar(const std::string& section, const std::string& key, double& out) {
    if (!has(section, key)) return;
    out = parse_double(get(section, key), section + "." + key);
  }
  void scalar(const std::string& section, const std::string& key, std::size_t& out) {
    if (!has(section, key)) return;
    out = static_cast<std::size_t>(std::stoull(get(section, key)));
  }
  void scalar(const std::string& section, const std::string& key, int& out) {
    if (!has(section, key)) return;
    out = std::stoi(get(section, key));
  }
  void scalar(const std::string& section, const std::string& key, bool& out) {
    if (!has(section, key)) return;
    const std::string v = get(section, key);
    if (v == "true" || v == "1") out = true;
    else if (v == "false" || v == "0") out = false;
    else throw ConfigError(section + "." + key + ": expected true/false");
  }
  void scalar(const std::string& section, const std::string& key, std::string& out) {
    if (!has(section, key)) return;
    out = get(section, key);
  }

  std::vector<double> list(const std::string& section, const std::string& key) {
    std::istringstream ss(get(section, key));
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(parse_double(tok, section + "." + key));
    return out;
  }

  void vec3(const std::string& section, const std::string& key, Vec3& out) {
    if (!has(section, key)) return;
    const std::vector<double> v = list(section, key);
    if (v.size() != 3) throw ConfigError(section + "." + key + ": expected 3 values");
    std::copy(v.begin(), v.end(), out.begin());
  }

  void vecN(const std::string& section, const std::string& key, std::vector<double>& out) {
    if (!has(section, key)) return;
    out = list(section, key);
  }

  std::vector<std::string> sections_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [name, _] : kv_) {
      if (name.rfind(prefix, 0) == 0) out.push_back(name);
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [section, keys] : kv_) {
      auto u = used_.find(section);
      for (const auto& [key, _] : keys) {
        if (u == used_.end() || u->second.count(key) == 0) {
          throw ConfigError("unknown config key: [" + section + "] " + key);
        }
      }
    }
  }

 private:
  static double parse_double(const std::string& s, const std::string& where) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError(where + ": cannot parse '" + s + "' as a number");
    }
  }

  KvMap kv_;
  std::map<std::string, std::set<std::string>> used_;
};

const char* axis_name(std::size_t axis) { return axis == 0 ? "x" : axis == 1 ? "y" : "z"; }

void read_channel(Reader& r, const std::string& section, ChannelConfig& ch) {
  r.scalar(section, "dac_gain", ch.dac_gain);
  r.vecN(section, "actuator_fir", ch.actuator_fir);
  r.scalar(section, "aa_taps", ch.aa_taps);
  r.scalar(section, "aa_cutoff_hz", ch.aa_cutoff_hz);
  r.scalar(section, "extra_delay_samples", ch.extra_delay_samples);
  r.scalar(section, "sensor_noise_floor_nt", ch.sensor_noise_floor_nt);
  r.scalar(section, "adc_bits", ch.adc_bits);
  r.scalar(section, "adc_range_nt", ch.adc_range_nt);
  r.scalar(section, "dac_limit", ch.dac_limit);
  r.scalar(section, "quantization", ch.quantization_enabled);
  r.scalar(section, "noise", ch.noise_enabled);
}

ExperimentConfig from_reader(Reader& r) {
  ExperimentConfig cfg = default_config();

  r.scalar("sim", "sample_rate_hz", cfg.sample_rate_hz);
  r.scalar("sim", "master_seed", cfg.master_seed);
  r.scalar("sim", "filter_taps", cfg.filter_taps);
  r.scalar("sim", "duration_sp_s", cfg.duration_sp_s);
  r.scalar("sim", "duration_anc_s", cfg.duration_anc_s);
  r.scalar("sim", "mu_sp_safety", cfg.mu_sp_safety);
  r.scalar("sim", "mu_anc_safety", cfg.mu_anc_safety);
  r.scalar("sim", "sp_drive_sigma", cfg.sp_drive_sigma);
  r.scalar("sim", "calibration_s", cfg.calibration_s);

  EnvironmentConfig& env = cfg.environment;
  r.vec3("environment", "dc_field_nt", env.dc_field_nt);
  r.scalar("environment", "echo_coupling", env.echo_coupling);
  r.vec3("environment", "reference_contamination_sigma_nt", env.reference_contamination_sigma_nt);
  r.scalar("environment", "reference_contamination_center_hz",
           env.reference_contamination_center_hz);
  r.scalar("environment", "reference_contamination_bandwidth_hz",
           env.reference_contamination_bandwidth_hz);
  for (std::size_t i = 0; i < 3; ++i) {
    Vec3 row = env.crosstalk[i];
    r.vec3("environment", "crosstalk_row" + std::to_string(i), row);
    env.crosstalk[i] = row;
  }
  bool clear_tones = false;
  r.scalar("environment", "clear_tones", clear_tones);
  const std::vector<std::string> tone_sections = r.sections_with_prefix("environment.tone");
  if (clear_tones || !tone_sections.empty()) env.tones.clear();
  for (const std::string& sec : tone_sections) {
    ToneConfig tone;
    r.scalar(sec, "freq_hz", tone.freq_hz);
    r.vec3(sec, "amplitude_nt", tone.amplitude_nt);
    r.vec3(sec, "phase_rad", tone.phase_rad);
    r.scalar(sec, "drift_per_s", tone.amplitude_drift_per_s);
    env.tones.push_back(tone);
  }
  {
    const std::string sec = "environment.broadband";
    std::string shape;
    r.scalar(sec, "shape", shape);
    if (!shape.empty()) {
      if (shape == "white") env.broadband.shape = BroadbandShape::White;
      else if (shape == "one_over_f") env.broadband.shape = BroadbandShape::OneOverF;
      else if (shape == "one_over_f2") env.broadband.shape = BroadbandShape::OneOverFSquared;
      else throw ConfigError("environment.broadband.shape: unknown shape '" + shape + "'");
    }
    r.vec3(sec, "sigma_nt", env.broadband.sigma_nt);
    r.scalar(sec, "corner_hz", env.broadband.corner_hz);
  }

  for (std::size_t axis = 0; axis < 3; ++axis) {
    read_channel(r, std::string("channel.") + axis_name(axis), cfg.channels[axis]);
  }

  r.scalar("pid", "kp", cfg.pid_kp);
  r.scalar("pid", "ki", cfg.pid_ki);
  r.scalar("pid", "kd", cfg.pid_kd);
  r.scalar("pid", "output_limit", cfg.pid_output_limit);

  r.scalar("prenull", "threshold_nt", cfg.prenull_threshold_nt);
  r.scalar("prenull", "hold_s", cfg.prenull_hold_s);
  r.scalar("prenull", "timeout_s", cfg.prenull_timeout_s);

  r.scalar("sp", "dc_threshold_nt", cfg.sp_dc_threshold_nt);

  r.scalar("welch", "segment_len", cfg.welch.segment_len);
  r.scalar("welch", "overlap", cfg.welch.overlap_fraction);
  {
    std::string window;
    r.scalar("welch", "window", window);
    if (!window.empty()) {
      if (window == "hann") cfg.welch.window = WindowKind::Hann;
      else if (window == "rect") cfg.welch.window = WindowKind::Rect;
      else throw ConfigError("welch.window: unknown window '" + window + "'");
    }
  }

  {
    bool any_band = false;
    for (std::size_t i = 0; i < 8; ++i) any_band = any_band || r.has("report", "band" + std::to_string(i));
    if (any_band) cfg.report_bands.clear();
    for (std::size_t i = 0; i < 8; ++i) {
      const std::string key = "band" + std::to_string(i);
      if (!r.has("report", key)) continue;
      const std::vector<double> v = r.list("report", key);
      if (v.size() != 2) throw ConfigError("report." + key + ": expected 'f_lo f_hi'");
      cfg.report_bands.push_back({v[0], v[1]});
    }
  }
  r.scalar("report", "gamma_hz_per_nt", cfg.gamma_hz_per_nt);
  r.scalar("report", "measure_s", cfg.measure_s);

  if (r.has("scan", "levels")) cfg.scan_levels = r.list("scan", "levels");
  r.scalar("scan", "target_gamma_sq", cfg.scan_target_gamma_sq);
  r.scalar("scan", "target_freq_hz", cfg.scan_target_freq_hz);
  r.scalar("scan", "filter_taps", cfg.scan_filter_taps);
  r.scalar("scan", "duration_s", cfg.scan_duration_s);
  r.scalar("scan", "measure_s", cfg.scan_measure_s);

  r.scalar("convergence", "window_s", cfg.convergence_window_s);
  r.scalar("convergence", "rel_tolerance", cfg.convergence_rel_tolerance);
  r.scalar("convergence", "max_phase_s", cfg.convergence_max_phase_s);

  r.reject_unknown();

  if (!(cfg.duration_sp_s > 0.0) || !(cfg.duration_anc_s > 0.0)) {
    throw ConfigError("durations must be > 0");
  }
  for (const ReportBand& band : cfg.report_bands) {
    if (!(band.f_lo_hz >= 0.0) || !(band.f_hi_hz > band.f_lo_hz) ||
        !(band.f_hi_hz <= cfg.sample_rate_hz / 2.0)) {
      throw ConfigError("report band outside [0, f_s/2]");
    }
  }
  try {
    validate(cfg.environment);
    for (const ChannelConfig& ch : cfg.channels) validate(ch);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  EnvironmentConfig& env = cfg.environment;
  env.dc_field_nt = {48000.0, 5000.0, 20000.0};
  // AC line fundamental plus third harmonic; amplitudes sized so the per-axis
  // 0-1 kHz band RMS lands near 800 / 150 / 450 nT.
  ToneConfig fifty;
  fifty.freq_hz = 50.0;
  fifty.amplitude_nt = {1074.6, 201.5, 604.5};
  fifty.phase_rad = {0.0, 0.7, 1.4};
  ToneConfig one_fifty;
  one_fifty.freq_hz = 150.0;
  one_fifty.amplitude_nt = {268.7, 50.4, 151.1};
  one_fifty.phase_rad = {0.3, 1.1, 1.9};
  env.tones = {fifty, one_fifty};
  env.broadband.shape = BroadbandShape::OneOverFSquared;
  env.broadband.sigma_nt = {32.0, 6.0, 18.0};
  env.broadband.corner_hz = 0.5;
  env.crosstalk = {{{1.0, 0.05, 0.05}, {0.05, 1.0, 0.05}, {0.05, 0.05, 1.0}}};
  env.echo_coupling = 0.02;
  return cfg;
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  auto v3 = [&](const Vec3& v) { return num(v[0]) + " " + num(v[1]) + " " + num(v[2]); };

  out << "[sim]\n";
  out << "sample_rate_hz = " << num(sample_rate_hz) << "\n";
  out << "master_seed = " << master_seed << "\n";
  out << "filter_taps = " << filter_taps << "\n";
  out << "duration_sp_s = " << num(duration_sp_s) << "\n";
  out << "duration_anc_s = " << num(duration_anc_s) << "\n";
  out << "mu_sp_safety = " << num(mu_sp_safety) << "\n";
  out << "mu_anc_safety = " << num(mu_anc_safety) << "\n";
  out << "sp_drive_sigma = " << num(sp_drive_sigma) << "\n";
  out << "calibration_s = " << num(calibration_s) << "\n";

  out << "[environment]\n";
  out << "dc_field_nt = " << v3(environment.dc_field_nt) << "\n";
  out << "echo_coupling = " << num(environment.echo_coupling) << "\n";
  out << "reference_contamination_sigma_nt = " << v3(environment.reference_contamination_sigma_nt)
      << "\n";
  out << "reference_contamination_center_hz = "
      << num(environment.reference_contamination_center_hz) << "\n";
  out << "reference_contamination_bandwidth_hz = "
      << num(environment.reference_contamination_bandwidth_hz) << "\n";
  for (std::size_t i = 0; i < 3; ++i) {
    out << "crosstalk_row" << i << " = " << v3(environment.crosstalk[i]) << "\n";
  }
  for (std::size_t i = 0; i < environment.tones.size(); ++i) {
    const ToneConfig& t = environment.tones[i];
    out << "[environment.tone" << i << "]\n";
    out << "freq_hz = " << num(t.freq_hz) << "\n";
    out << "amplitude_nt = " << v3(t.amplitude_nt) << "\n";
    out << "phase_rad = " << v3(t.phase_rad) << "\n";
    out << "drift_per_s = " << num(t.amplitude_drift_per_s) << "\n";
  }
  out << "[environment.broadband]\n";
  out << "shape = "
      << (environment.broadband.shape == BroadbandShape::White            ? "white"
          : environment.broadband.shape == BroadbandShape::OneOverF ? "one_over_f"
                                                                         : "one_over_f2")
      << "\n";
  out << "sigma_nt = " << v3(environment.broadband.sigma_nt) << "\n";
  out << "corner_hz = " << num(environment.broadband.corner_hz) << "\n";

  const char* names[3] = {"x", "y", "z"};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const ChannelConfig& ch = channels[axis];
    out << "[channel." << names[axis] << "]\n";
    out << "dac_gain = " << num(ch.dac_gain) << "\n";
    out << "actuator_fir =";
    for (double c : ch.actuator_fir) out << " " << num(c);
    out << "\n";
    out << "aa_taps = " << ch.aa_taps << "\n";
    out << "aa_cutoff_hz = " << num(ch.aa_cutoff_hz) << "\n";
    out << "extra_delay_samples = " << ch.extra_delay_samples << "\n";
    out << "sensor_noise_floor_nt = " << num(ch.sensor_noise_floor_nt) << "\n";
    out << "adc_bits = " << ch.adc_bits << "\n";
    out << "adc_range_nt = " << num(ch.adc_range_nt) << "\n";
    out << "dac_limit = " << num(ch.dac_limit) << "\n";
    out << "quantization = " << (ch.quantization_enabled ? "true" : "false") << "\n";
    out << "noise = " << (ch.noise_enabled ? "true" : "false") << "\n";
  }

  out << "[pid]\n";
  out << "kp = " << num(pid_kp) << "\n";
  out << "ki = " << num(pid_ki) << "\n";
  out << "kd = " << num(pid_kd) << "\n";
  out << "output_limit = " << num(pid_output_limit) << "\n";

  out << "[prenull]\n";
  out << "threshold_nt = " << num(prenull_threshold_nt) << "\n";
  out << "hold_s = " << num(prenull_hold_s) << "\n";
  out << "timeout_s = " << num(prenull_timeout_s) << "\n";

  out << "[sp]\n";
  out << "dc_threshold_nt = " << num(sp_dc_threshold_nt) << "\n";

  out << "[welch]\n";
  out << "segment_len = " << welch.segment_len << "\n";
  out << "overlap = " << num(welch.overlap_fraction) << "\n";
  out << "window = " << (welch.window == WindowKind::Hann ? "hann" : "rect") << "\n";

  out << "[report]\n";
  for (std::size_t i = 0; i < report_bands.size(); ++i) {
    out << "band" << i << " = " << num(report_bands[i].f_lo_hz) << " "
        << num(report_bands[i].f_hi_hz) << "\n";
  }
  out << "gamma_hz_per_nt = " << num(gamma_hz_per_nt) << "\n";
  out << "measure_s = " << num(measure_s) << "\n";

  out << "[scan]\n";
  out << "levels =";
  for (double l : scan_levels) out << " " << num(l);
  out << "\n";
  out << "target_gamma_sq = " << num(scan_target_gamma_sq) << "\n";
  out << "target_freq_hz = " << num(scan_target_freq_hz) << "\n";
  out << "filter_taps = " << scan_filter_taps << "\n";
  out << "duration_s = " << num(scan_duration_s) << "\n";
  out << "measure_s = " << num(scan_measure_s) << "\n";

  out << "[convergence]\n";
  out << "window_s = " << num(convergence_window_s) << "\n";
  out << "rel_tolerance = " << num(convergence_rel_tolerance) << "\n";
  out << "max_phase_s = " << num(convergence_max_phase_s) << "\n";
  return out.str();
}

std::string ExperimentConfig::config_hash() const { return hash_hex(fnv1a64(canonical_text())); }

ExperimentConfig parse_config_text(const std::string& text) {
  KvMap kv = parse_kv(text);
  apply_env_overrides(kv);
  Reader reader(std::move(kv));
  return from_reader(reader);
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void write_config_file(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path.string());
  out << cfg.canonical_text();
}

}  // namespace anc
