#include "anc/adaptive.hpp"

#include <algorithm>
#include <cmath>

#include "anc/rng.hpp"

namespace anc {

double stability_bound(std::size_t taps, double signal_power) {
  if (taps == 0) throw std::invalid_argument("stability_bound: taps must be >= 1");
  if (!(signal_power > 0.0)) throw std::invalid_argument("stability_bound: power must be > 0");
  return 1.0 / (static_cast<double>(taps) * signal_power);
}

AdaptiveFir::AdaptiveFir(std::size_t taps, double mu)
    : coeffs_(taps, 0.0), line_(taps, 0.0), mu_(mu) {
  if (taps == 0) throw std::invalid_argument("AdaptiveFir: taps must be >= 1");
  if (!(mu > 0.0)) throw std::invalid_argument("AdaptiveFir: mu must be > 0");
}

void AdaptiveFir::push(double x) {
  for (std::size_t i = line_.size() - 1; i > 0; --i) line_[i] = line_[i - 1];
  line_[0] = x;
}

double AdaptiveFir::predict() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) acc += coeffs_[i] * line_[i];
  return acc;
}

void AdaptiveFir::update(double error) {
  if (!std::isfinite(error)) throw DivergenceError("AdaptiveFir: non-finite error", steps_);
  const double g = mu_ * error;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += g * line_[i];
  ++steps_;
  if ((steps_ & 0x3f) == 0 && coefficient_norm() > kDivergenceNormThreshold) {
    throw DivergenceError("AdaptiveFir: coefficient norm past divergence threshold", steps_);
  }
}

double AdaptiveFir::coefficient_norm() const {
  double s = 0.0;
  for (double c : coeffs_) s += c * c;
  return std::sqrt(s);
}

SecondaryPathModel estimate_secondary_path(const std::function<double(double)>& plant_step,
                                           const WhiteNoiseSource& noise_cfg, std::size_t taps,
                                           double mu_sp, double duration_s,
                                           double sample_rate_hz, const SpEstimateOptions& opts) {
  if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0)) {
    throw std::invalid_argument("estimate_secondary_path: bad duration or sample rate");
  }
  const std::size_t n_steps = static_cast<std::size_t>(duration_s * sample_rate_hz);
  const std::size_t tail_start = static_cast<std::size_t>(
      static_cast<double>(n_steps) * (1.0 - std::clamp(opts.tail_average_fraction, 0.0, 1.0)));

  CounterRng rng(noise_cfg.seed, RngStream::SpDrive);
  AdaptiveFir filt(taps, mu_sp);

  std::vector<double> coeff_acc(taps, 0.0);
  double residual_acc = 0.0;
  std::size_t tail_count = 0;

  double dc_mean = 0.0;
  const double dc_alpha = 1.0 / (opts.dc_time_constant_s * sample_rate_hz);
  const std::size_t dc_warmup = static_cast<std::size_t>(2.0 * opts.dc_time_constant_s * sample_rate_hz);

  for (std::size_t n = 0; n < n_steps; ++n) {
    const double y = noise_cfg.sigma * rng.gaussian(n);
    const double e = plant_step(y);
    if (!std::isfinite(e)) throw DivergenceError("estimate_secondary_path: non-finite plant output", n);

    if (opts.dc_threshold > 0.0) {
      dc_mean += dc_alpha * (e - dc_mean);
      if (n > dc_warmup && std::abs(dc_mean) > opts.dc_threshold) {
        throw std::runtime_error("estimate_secondary_path: unnulled DC detected (running mean " +
                                 std::to_string(dc_mean) + " nT)");
      }
    }

    filt.push(y);
    const double err = e - filt.predict();
    filt.update(err);

    if (filt.coefficient_norm() > opts.divergence_threshold) {
      throw DivergenceError("estimate_secondary_path: coefficient norm diverged", n);
    }

    if (n >= tail_start) {
      const std::vector<double>& c = filt.coefficients();
      for (std::size_t i = 0; i < taps; ++i) coeff_acc[i] += c[i];
      residual_acc += err * err;
      ++tail_count;
    }
  }

  SecondaryPathModel model;
  model.sample_rate_hz = sample_rate_hz;
  model.mu_sp = mu_sp;
  model.duration_s = duration_s;
  model.coefficients.resize(taps);
  if (tail_count > 0) {
    for (std::size_t i = 0; i < taps; ++i) {
      model.coefficients[i] = coeff_acc[i] / static_cast<double>(tail_count);
    }
    model.residual_power = residual_acc / static_cast<double>(tail_count);
  } else {
    model.coefficients = filt.coefficients();
  }
  return model;
}

FxLms::FxLms(SecondaryPathModel model, double mu_anc, std::size_t taps)
    : model_(std::move(model)),
      w_(taps == 0 ? model_.coefficients.size() : taps, 0.0),
      x_(std::max(w_.size(), model_.coefficients.size()), 0.0),
      xf_(w_.size(), 0.0),
      mu_(mu_anc) {
  if (model_.coefficients.empty()) throw std::invalid_argument("FxLms: empty secondary path model");
  if (!(mu_ > 0.0)) throw std::invalid_argument("FxLms: mu must be > 0");
}

double FxLms::filter_reference(double x_n) {
  for (std::size_t i = x_.size() - 1; i > 0; --i) x_[i] = x_[i - 1];
  x_[0] = x_n;
  double xf = 0.0;
  for (std::size_t i = 0; i < model_.coefficients.size(); ++i) {
    xf += model_.coefficients[i] * x_[i];
  }
  for (std::size_t i = xf_.size() - 1; i > 0; --i) xf_[i] = xf_[i - 1];
  xf_[0] = xf;
  return xf;
}

double FxLms::compute_antinoise() const {
  double y = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) y += w_[i] * x_[i];
  return y;
}

void FxLms::update(double e_n) {
  if (!std::isfinite(e_n)) throw DivergenceError("FxLms: non-finite error", steps_);
  const double g = mu_ * e_n;
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] -= g * xf_[i];
  ++steps_;
  if ((steps_ & 0x3f) == 0 && weight_norm() > kDivergenceNormThreshold) {
    throw DivergenceError("FxLms: weight norm past divergence threshold", steps_);
  }
}

double FxLms::weight_norm() const {
  double s = 0.0;
  for (double w : w_) s += w * w;
  return std::sqrt(s);
}

bool detect_convergence(const SampleBuffer& error_history, double window_s,
                        double rel_tolerance) {
  if (!(window_s > 0.0) || !(error_history.sample_rate_hz > 0.0)) {
    throw std::invalid_argument("detect_convergence: bad window or rate");
  }
  const std::size_t wlen = static_cast<std::size_t>(window_s * error_history.sample_rate_hz);
  if (wlen == 0 || error_history.samples.size() < 2 * wlen) {
    throw std::invalid_argument("detect_convergence: history must cover at least 2 windows");
  }
  std::vector<double> window_rms;
  for (std::size_t s = 0; s + wlen <= error_history.samples.size(); s += wlen) {
    double acc = 0.0;
    for (std::size_t i = 0; i < wlen; ++i) {
      const double v = error_history.samples[s + i];
      acc += v * v;
    }
    window_rms.push_back(std::sqrt(acc / static_cast<double>(wlen)));
  }
  const std::size_t nchanges = std::min<std::size_t>(3, window_rms.size() - 1);
  for (std::size_t j = 0; j < nchanges; ++j) {
    const std::size_t i = window_rms.size() - 1 - j;
    const double prev = window_rms[i - 1];
    const double rel = prev > 0.0 ? std::abs(window_rms[i] - prev) / prev
                                  : std::abs(window_rms[i]);
    if (rel >= rel_tolerance) return false;
  }
  return true;
}

}  // namespace anc
