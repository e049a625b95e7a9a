#pragma once

#include <array>
#include <random>

namespace eqppo::cpg {

inline constexpr int kNumLimbs = 4;
inline constexpr int kNumJoints = 12;

/// Limb order used everywhere: FR, FL, RR, RL. Trot pairs are (FR, RL) and (FL, RR).
enum Limb { kFR = 0, kFL = 1, kRR = 2, kRL = 3 };

struct OscillatorParams {
  double mu = 1.0;     // target amplitude, [1, 2]
  double omega = 0.0;  // phase rate (rad/s), [0, 3]
  double psi = 0.0;    // direction-phase rate (rad/s), [-1.5, 1.5]
};

struct OscillatorState {
  double r = 1.0;
  double r_dot = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct OscillatorBank {
  std::array<OscillatorState, kNumLimbs> limbs{};
  std::array<OscillatorParams, kNumLimbs> params{};
  double a = 150.0;
};

/// Wraps into [-pi, pi].
double wrap_angle(double x);

/// r_ddot = a (a/4 (mu - r) - r_dot), theta_dot = omega, phi_dot = psi.
/// Semi-implicit Euler: r_dot first, then r with the new rate.
OscillatorBank hopf_step(const OscillatorBank& bank, double dt);

/// Clamps commanded parameters to mu in [1, 2], omega in [0, 3], psi in [-1.5, 1.5].
OscillatorParams clamp_params(const OscillatorParams& p);

/// Episode initialization: theta_a ~ U(-pi, pi), theta_b = theta_a shifted by pi;
/// FR and RL start at theta_a, FL and RR at theta_b; r ~ U(1, 2); phi ~ U(-pi/12, pi/12).
OscillatorBank trot_init(std::mt19937_64& rng);

}  // namespace eqppo::cpg
