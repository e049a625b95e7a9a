#include "eqppo/envsim/reward.hpp"

#include <cmath>

#include "eqppo/common/errors.hpp"

namespace eqppo::envsim {

RewardCoefficients RewardCoefficients::for_stage(int stage) {
  if (stage == 1) return {3.0, 0.25};
  if (stage == 2) return {6.0, 0.04};
  throw ConfigError("stage must be 1 or 2");
}

double closeness(double x, double d) { return std::exp(-x * x / d); }

RewardTerms reward(const BodyRates& s, const Command& c, double power, double dt, int stage) {
  const auto k = RewardCoefficients::for_stage(stage);
  RewardTerms r;
  r.vx = k.alpha_vx * dt * closeness(s.vx - c.vx, k.d_r1);
  r.vy = 0.75 * dt * closeness(s.vy - c.vy, 0.25);
  r.yaw = 0.5 * dt * closeness(s.yaw_rate - c.yaw_rate, 0.25);
  r.vz = -2.0 * dt * s.vz * s.vz;
  r.angular = -0.05 * dt * (s.roll_rate * s.roll_rate + s.pitch_rate * s.pitch_rate);
  r.power = -0.001 * dt * power;
  r.total = r.vx + r.vy + r.yaw + r.vz + r.angular + r.power;
  return r;
}

RewardTerms reward(const BodyRates& s, const Command& c, std::span<const double> torques,
                   std::span<const double> joint_vels, double dt, int stage) {
  if (torques.size() != joint_vels.size()) throw ContractError("torque and velocity counts differ");
  double power = 0.0;
  for (std::size_t i = 0; i < torques.size(); ++i) power += torques[i] * joint_vels[i];
  return reward(s, c, power, dt, stage);
}

}  // namespace eqppo::envsim
