#include "eqppo/cpg/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eqppo::cpg {

double wrap_angle(double x) {
  constexpr double kPi = std::numbers::pi;
  if (x >= -kPi && x <= kPi) return x;
  double y = std::remainder(x, 2.0 * kPi);
  return std::clamp(y, -kPi, kPi);
}

OscillatorParams clamp_params(const OscillatorParams& p) {
  return {std::clamp(p.mu, 1.0, 2.0), std::clamp(p.omega, 0.0, 3.0), std::clamp(p.psi, -1.5, 1.5)};
}

OscillatorBank hopf_step(const OscillatorBank& bank, double dt) {
  OscillatorBank out = bank;
  const double a = bank.a;
  for (int i = 0; i < kNumLimbs; ++i) {
    auto& s = out.limbs[i];
    const auto& p = bank.params[i];
    double r_ddot = a * (a / 4.0 * (p.mu - s.r) - s.r_dot);
    s.r_dot += r_ddot * dt;
    s.r += s.r_dot * dt;
    s.theta = wrap_angle(s.theta + p.omega * dt);
    s.phi = wrap_angle(s.phi + p.psi * dt);
  }
  return out;
}

OscillatorBank trot_init(std::mt19937_64& rng) {
  constexpr double kPi = std::numbers::pi;
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  std::uniform_real_distribution<double> amp(1.0, 2.0);
  std::uniform_real_distribution<double> dir(-kPi / 12.0, kPi / 12.0);
  OscillatorBank bank;
  double theta_a = phase(rng);
  double theta_b = wrap_angle(theta_a + kPi);
  for (int i = 0; i < kNumLimbs; ++i) {
    auto& s = bank.limbs[i];
    s.r = amp(rng);
    s.r_dot = 0.0;
    s.theta = (i == kFR || i == kRL) ? theta_a : theta_b;
    s.phi = dir(rng);
    bank.params[i] = {s.r, 0.0, 0.0};
  }
  return bank;
}

}  // namespace eqppo::cpg
