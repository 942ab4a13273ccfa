#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anc/noise.hpp"
#include "anc/sample_buffer.hpp"

namespace anc {

// Thrown when an adaptive loop blows up: coefficient norm past the configured
// threshold or a non-finite value. Carries the sample index where it happened.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, std::size_t step_index)
      : std::runtime_error(what + " (step " + std::to_string(step_index) + ")"),
        step(step_index) {}
  std::size_t step;
};

inline constexpr double kDivergenceNormThreshold = 1e6;

// mu_max = 1 / (M * P); callers pick mu = safety_factor * mu_max.
double stability_bound(std::size_t taps, double signal_power);

// M-tap FIR with mutable coefficients and a delay line (most recent first).
class AdaptiveFir {
 public:
  AdaptiveFir(std::size_t taps, double mu);

  void push(double x);
  // r(n) = sum_i c_i(n) * line[i]
  double predict() const;
  // c_i += mu * error * line[i]; delay line untouched.
  void update(double error);

  const std::vector<double>& coefficients() const { return coeffs_; }
  const std::vector<double>& delay_line() const { return line_; }
  std::vector<double>& mutable_coefficients() { return coeffs_; }
  double mu() const { return mu_; }
  double coefficient_norm() const;
  std::size_t taps() const { return coeffs_.size(); }
  std::size_t step_count() const { return steps_; }

 private:
  std::vector<double> coeffs_;
  std::vector<double> line_;
  double mu_;
  std::size_t steps_ = 0;
};

// Frozen secondary-path estimate C(z) ~ H(z) with its training metadata.
struct SecondaryPathModel {
  std::vector<double> coefficients;
  double sample_rate_hz = 0.0;
  double mu_sp = 0.0;
  double duration_s = 0.0;
  double residual_power = 0.0;
};

struct SpEstimateOptions {
  double divergence_threshold = kDivergenceNormThreshold;
  // Frozen coefficients are the time average over this trailing fraction of
  // the run; averaging shrinks the gradient-noise floor without touching the
  // per-step update rule.
  double tail_average_fraction = 0.75;
  // Running-mean |e| beyond this trips the unnulled-DC error. <=0 disables.
  double dc_threshold = 0.0;
  double dc_time_constant_s = 2.0;
};

// LMS identification loop: drive the plant with white noise, per sample
// compute r(n), e'(n) = e(n) - r(n), and update the coefficients. The plant
// callback advances one tick with the given drive and returns the sensed
// response; any loop latency belongs to the callback, and the recovered
// coefficients include it.
SecondaryPathModel estimate_secondary_path(const std::function<double(double)>& plant_step,
                                           const WhiteNoiseSource& noise_cfg, std::size_t taps,
                                           double mu_sp, double duration_s,
                                           double sample_rate_hz,
                                           const SpEstimateOptions& opts = {});

// FxLMS state for one axis: anti-noise filter W, frozen C, and matching
// reference / filtered-reference histories.
class FxLms {
 public:
  // taps: anti-noise filter length; 0 means match the secondary-path model.
  // Longer W gives finer frequency resolution than the model needs.
  FxLms(SecondaryPathModel model, double mu_anc, std::size_t taps = 0);

  // Pushes x(n), returns x'(n) = sum_i c(i) x(n-i), and records it.
  double filter_reference(double x_n);
  // y(n) = sum_i w_i(n) x(n-i) over the current history.
  double compute_antinoise() const;
  // w_i -= mu_anc * e_n * x'(n-i). Note the minus sign (opposite of the
  // identification update).
  void update(double e_n);

  const std::vector<double>& weights() const { return w_; }
  std::vector<double>& mutable_weights() { return w_; }
  const std::vector<double>& reference_history() const { return x_; }
  const std::vector<double>& filtered_history() const { return xf_; }
  const SecondaryPathModel& model() const { return model_; }
  double mu() const { return mu_; }
  double weight_norm() const;
  std::size_t taps() const { return w_.size(); }
  std::size_t step_count() const { return steps_; }

 private:
  SecondaryPathModel model_;
  std::vector<double> w_;
  std::vector<double> x_;   // reference history, most recent first
  std::vector<double> xf_;  // filtered reference history, most recent first
  double mu_;
  std::size_t steps_ = 0;
};

// True when the RMS of consecutive windows changes by less than rel_tolerance
// for 3 consecutive windows. Growing RMS never counts as converged.
bool detect_convergence(const SampleBuffer& error_history, double window_s,
                        double rel_tolerance = 0.05);

}  // namespace anc
