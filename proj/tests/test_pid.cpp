#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "anc/pid.hpp"
#include "anc/plant.hpp"

using namespace anc;

namespace {

ChannelConfig clean_channel() {
  ChannelConfig c;
  c.noise_enabled = false;
  c.quantization_enabled = false;
  return c;
}

}  // namespace

TEST_CASE("pid proportional-only output is kp times error") {
  PidGains g;
  g.kp = 2.0;
  g.output_limit = 100.0;
  g.dt_s = 0.001;
  PidResult r = pid_step(g, PidState{}, 3.0);
  CHECK(r.output == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(r.state.primed);
  CHECK(r.state.previous_error == 3.0);
}

TEST_CASE("pid pure integrator ramps at ki * e * dt per step") {
  PidGains g;
  g.ki = 10.0;
  g.output_limit = 1000.0;
  g.dt_s = 0.01;
  PidState s{};
  for (int n = 1; n <= 20; ++n) {
    PidResult r = pid_step(g, s, 2.0);
    s = r.state;
    CHECK(r.output == doctest::Approx(10.0 * 2.0 * 0.01 * n).epsilon(1e-12));
  }
}

TEST_CASE("pid derivative acts on the backward difference and is zero unprimed") {
  PidGains g;
  g.kd = 0.5;
  g.output_limit = 1000.0;
  g.dt_s = 0.1;
  PidResult r1 = pid_step(g, PidState{}, 4.0);
  CHECK(r1.output == 0.0);  // derivative unprimed
  PidResult r2 = pid_step(g, r1.state, 6.0);
  CHECK(r2.output == doctest::Approx(0.5 * (6.0 - 4.0) / 0.1).epsilon(1e-12));
}

TEST_CASE("pid anti-windup clamps the integral and recovers") {
  PidGains g;
  g.ki = 100.0;
  g.output_limit = 5.0;
  g.dt_s = 0.01;
  PidState s{};
  for (int n = 0; n < 100; ++n) {
    PidResult r = pid_step(g, s, 10.0);
    s = r.state;
    CHECK(std::abs(s.integral) <= 5.0);
    CHECK(std::abs(r.output) <= 5.0);
  }
  CHECK(s.integral == 5.0);
  // error reverses: the clamped integrator unwinds immediately instead of
  // bleeding off accumulated windup
  PidResult r = pid_step(g, s, -10.0);
  CHECK(r.state.integral == doctest::Approx(5.0 - 100.0 * 10.0 * 0.01).epsilon(1e-12));
}

TEST_CASE("pid validation rejects bad dt, limit, and non-finite error") {
  PidGains g;
  g.dt_s = 0.0;
  g.output_limit = 1.0;
  CHECK_THROWS_AS(pid_step(g, PidState{}, 1.0), std::invalid_argument);
  g.dt_s = 0.01;
  g.output_limit = 0.0;
  CHECK_THROWS_AS(pid_step(g, PidState{}, 1.0), std::invalid_argument);
  g.output_limit = 1.0;
  CHECK_THROWS_AS(pid_step(g, PidState{}, std::nan("")), std::invalid_argument);
}

TEST_CASE("pid closed loop nulls a step disturbance within 2 seconds") {
  const double fs = 5000.0;
  EnvironmentConfig env;
  env.echo_coupling = 0.0;
  env.dc_field_nt = {1000.0, 1000.0, 1000.0};
  std::array<ChannelConfig, 3> ch{clean_channel(), clean_channel(), clean_channel()};
  ThreeAxisPlant plant(env, ch, fs, 1);
  PidGains g;
  g.kp = 0.003;
  g.ki = 0.6;
  g.output_limit = 1000.0;
  g.dt_s = 1.0 / fs;
  std::array<PidState, 3> state{};
  Vec3 drive{};
  double tail_mean = 0.0;
  std::size_t tail_count = 0;
  const std::size_t n_steps = static_cast<std::size_t>(2.0 * fs);
  for (std::size_t n = 0; n < n_steps; ++n) {
    SensorReading r = plant.sense(drive);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      PidResult pr = pid_step(g, state[axis], -r.error_sensor_nt[axis]);
      state[axis] = pr.state;
      drive[axis] = pr.output;
    }
    if (n >= n_steps - 500) {
      tail_mean += std::abs(r.error_sensor_nt[0]);
      ++tail_count;
    }
  }
  CHECK(tail_mean / static_cast<double>(tail_count) < 10.0);  // < 1% of the 1000 nT step
}

TEST_CASE("dc prenull drives a dc-only field below the threshold") {
  const double fs = 5000.0;
  EnvironmentConfig env;
  env.echo_coupling = 0.0;
  env.dc_field_nt = {480.0, 50.0, 200.0};
  std::array<ChannelConfig, 3> ch{clean_channel(), clean_channel(), clean_channel()};
  ThreeAxisPlant plant(env, ch, fs, 1);
  PidGains g;
  g.kp = 0.003;
  g.ki = 0.6;
  g.output_limit = 1000.0;
  g.dt_s = 1.0 / fs;
  Vec3 offsets = dc_prenull(plant, g);
  // frozen offsets alone must hold the residual under the threshold
  ThreeAxisPlant verify(env, ch, fs, 1);
  Vec3 acc{};
  const std::size_t n = 2000;
  for (std::size_t i = 0; i < n; ++i) {
    SensorReading r = verify.sense(offsets);
    if (i >= 500) {
      for (std::size_t axis = 0; axis < 3; ++axis) acc[axis] += r.error_sensor_nt[axis];
    }
  }
  for (std::size_t axis = 0; axis < 3; ++axis) {
    CHECK(std::abs(acc[axis] / static_cast<double>(n - 500)) < 10.0);
  }
}

TEST_CASE("dc prenull with zero field returns near-zero offsets") {
  const double fs = 5000.0;
  EnvironmentConfig env;
  env.echo_coupling = 0.0;
  std::array<ChannelConfig, 3> ch{clean_channel(), clean_channel(), clean_channel()};
  ThreeAxisPlant plant(env, ch, fs, 1);
  PidGains g;
  g.kp = 0.003;
  g.ki = 0.6;
  g.output_limit = 1000.0;
  g.dt_s = 1.0 / fs;
  Vec3 offsets = dc_prenull(plant, g);
  for (std::size_t axis = 0; axis < 3; ++axis) CHECK(std::abs(offsets[axis]) < 1e-6);
}

TEST_CASE("dc prenull reports saturation when the field is out of range") {
  const double fs = 5000.0;
  EnvironmentConfig env;
  env.echo_coupling = 0.0;
  env.dc_field_nt = {500000.0, 0.0, 0.0};  // beyond dac_limit * actuator gain
  std::array<ChannelConfig, 3> ch{clean_channel(), clean_channel(), clean_channel()};
  ThreeAxisPlant plant(env, ch, fs, 1);
  PidGains g;
  g.kp = 0.003;
  g.ki = 0.6;
  g.output_limit = 10000.0;
  g.dt_s = 1.0 / fs;
  PrenullOptions opts;
  opts.timeout_s = 2.0;
  bool threw = false;
  try {
    dc_prenull(plant, g, opts);
  } catch (const PrenullError& e) {
    threw = true;
    CHECK(e.saturated);
    CHECK(std::abs(e.final_mean_nt[0]) > 10.0);
  }
  CHECK(threw);
}
