#pragma once

#include <span>

namespace eqppo::envsim {

struct Command {
  double vx = 0.0;
  double vy = 0.0;
  double yaw_rate = 0.0;
};

/// Body-frame rates the reward depends on.
struct BodyRates {
  double vx = 0.0, vy = 0.0, vz = 0.0;
  double roll_rate = 0.0, pitch_rate = 0.0, yaw_rate = 0.0;
};

struct RewardTerms {
  double vx = 0.0;
  double vy = 0.0;
  double yaw = 0.0;
  double vz = 0.0;
  double angular = 0.0;
  double power = 0.0;
  double total = 0.0;  // vx + vy + yaw + vz + angular + power, summed in that order
};

struct RewardCoefficients {
  double alpha_vx;
  double d_r1;
  static RewardCoefficients for_stage(int stage);
};

double closeness(double x, double d);

/// power is sum_i tau_i q_dot_i.
RewardTerms reward(const BodyRates& rates, const Command& cmd, double power, double dt_rl, int stage);
RewardTerms reward(const BodyRates& rates, const Command& cmd, std::span<const double> torques,
                   std::span<const double> joint_vels, double dt_rl, int stage);

}  // namespace eqppo::envsim
