#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "anc/plant.hpp"

namespace anc {

// Parallel discrete PID with backward-difference derivative and a clamped
// integrator for anti-windup.
struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double output_limit = 1.0;
  double dt_s = 0.0;
};

struct PidState {
  double integral = 0.0;       // accumulated integral term, ki included
  double previous_error = 0.0;
  bool primed = false;         // derivative is zero on the first step
};

void validate(const PidGains& gains);

struct PidResult {
  double output = 0.0;
  PidState state;
};

PidResult pid_step(const PidGains& gains, const PidState& state, double error);

struct PrenullOptions {
  double threshold_nt = 10.0;  // low-passed |mean| must stay under this
  double hold_s = 1.0;
  double timeout_s = 30.0;
  double lowpass_tau_s = 1.0;  // long enough that 50 Hz ripple stays under the threshold
};

struct PrenullError : std::runtime_error {
  PrenullError(const std::string& what, Vec3 final_mean_nt, bool saturated)
      : std::runtime_error(what), final_mean_nt(final_mean_nt), saturated(saturated) {}
  Vec3 final_mean_nt{};
  bool saturated = false;
};

// Closed-loop PID per axis until the low-passed error-sensor mean stays under
// the threshold for hold_s. Returns the frozen DC drive offsets; afterwards
// secondary-path estimation adds white noise on top of these with the PID off.
Vec3 dc_prenull(ThreeAxisPlant& plant, const PidGains& gains, const PrenullOptions& opts = {});

}  // namespace anc
