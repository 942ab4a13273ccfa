#include "anc/pid.hpp"

#include <algorithm>
#include <cmath>

namespace anc {

void validate(const PidGains& gains) {
  if (!(gains.dt_s > 0.0)) throw std::invalid_argument("PidGains: dt_s must be > 0");
  if (!(gains.output_limit > 0.0)) throw std::invalid_argument("PidGains: output_limit must be > 0");
}

PidResult pid_step(const PidGains& gains, const PidState& state, double error) {
  validate(gains);
  if (!std::isfinite(error)) throw std::invalid_argument("pid_step: non-finite error");

  PidResult r;
  r.state = state;
  r.state.integral += gains.ki * error * gains.dt_s;
  // integrator clamp: the accumulated term alone never exceeds the output limit
  r.state.integral = std::clamp(r.state.integral, -gains.output_limit, gains.output_limit);

  const double de = state.primed ? (error - state.previous_error) / gains.dt_s : 0.0;
  const double raw = gains.kp * error + r.state.integral + gains.kd * de;
  r.output = std::clamp(raw, -gains.output_limit, gains.output_limit);
  r.state.previous_error = error;
  r.state.primed = true;
  return r;
}

Vec3 dc_prenull(ThreeAxisPlant& plant, const PidGains& gains, const PrenullOptions& opts) {
  validate(gains);
  const double fs = plant.sample_rate_hz();
  const std::size_t max_steps = static_cast<std::size_t>(opts.timeout_s * fs);
  const std::size_t hold_steps = static_cast<std::size_t>(opts.hold_s * fs);
  const double alpha = 1.0 / (opts.lowpass_tau_s * fs);

  std::array<PidState, 3> state{};
  Vec3 drive{};
  Vec3 lp_mean{};
  Vec3 drive_acc{};
  std::size_t held = 0;
  bool any_saturated = false;

  for (std::size_t n = 0; n < max_steps; ++n) {
    const SensorReading reading = plant.sense(drive);
    bool within = true;
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const double err = -reading.error_sensor_nt[axis];  // setpoint is zero field
      PidResult r = pid_step(gains, state[axis], err);
      state[axis] = r.state;
      drive[axis] = r.output;
      lp_mean[axis] += alpha * (reading.error_sensor_nt[axis] - lp_mean[axis]);
      if (std::abs(lp_mean[axis]) >= opts.threshold_nt) within = false;
      any_saturated = any_saturated || reading.saturated[axis];
    }
    if (within) {
      for (std::size_t axis = 0; axis < 3; ++axis) drive_acc[axis] += drive[axis];
    } else {
      drive_acc = {};
    }
    held = within ? held + 1 : 0;
    if (held >= hold_steps) {
      // average over the hold window so tonal ripple in the live PID output
      // does not end up frozen into the DC offsets
      for (std::size_t axis = 0; axis < 3; ++axis) {
        drive_acc[axis] /= static_cast<double>(held);
      }
      return drive_acc;
    }
  }
  throw PrenullError("dc_prenull: failed to settle within timeout", lp_mean, any_saturated);
}

}  // namespace anc
