#pragma once

#include <cmath>
#include <cstdint>

namespace anc {

inline constexpr double kPi = 3.14159265358979323846;

// Named PRNG streams derived from one master seed. Every stochastic element of
// a run draws from its own stream so that stages can be re-run independently
// without perturbing each other.
enum class RngStream : std::uint64_t {
  SpDrive = 1,
  EnvBroadbandX = 10,
  EnvBroadbandY = 11,
  EnvBroadbandZ = 12,
  ChannelNoiseX = 20,
  ChannelNoiseY = 21,
  ChannelNoiseZ = 22,
  ErrorSensorNoise = 30,
  ReferenceContamination = 31,
  Generic = 100,
};

// Counter-based generator: splitmix64 finalizer applied to a keyed counter.
// value(i) is a pure function of (seed, stream, i), so streams are
// random-access and bit-reproducible regardless of call interleaving.
class CounterRng {
 public:
  CounterRng() : CounterRng(0, 0) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed) ^ mix(stream * 0x9e3779b97f4a7c15ull))) {}
  CounterRng(std::uint64_t seed, RngStream stream)
      : CounterRng(seed, static_cast<std::uint64_t>(stream)) {}

  // Uniform in (0,1), open at both ends.
  double uniform(std::uint64_t i) const {
    const std::uint64_t z = mix(key_ + i * 0x9e3779b97f4a7c15ull);
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on two counter draws.
  double gaussian(std::uint64_t i) const {
    const double u1 = uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Sequential convenience for stateful consumers.
  double next_gaussian() { return gaussian(counter_++); }
  double next_uniform() { return uniform(counter_++); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace anc
