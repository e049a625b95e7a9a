#pragma once

#include <cstdint>
#include <random>

#include "eqppo/envsim/env.hpp"

namespace eqppo::envsim {

/// 1-D velocity tracking: a first-order lag from a commanded speed to the
/// actual speed, rewarded with the stage-2 x-velocity closeness term.
struct VelocityTrackingParams {
  double dt = 0.05;
  double lag = 0.5;          // s
  double action_scale = 0.5; // m/s per unit action
  double v_upper = 0.5;
  double alpha = 3.0;
  double d = 0.04;
  double action_penalty = 0.05;
  double noise = 0.01;  // m/s per step
  int horizon = 100;
};

class VelocityTrackingEnv : public Env {
 public:
  VelocityTrackingEnv(VelocityTrackingParams params, std::uint64_t seed);

  int obs_dim() const override { return 3; }
  int action_dim() const override { return 1; }
  std::vector<double> reset() override;
  StepResult step(std::span<const double> action) override;

  double velocity() const { return v_; }
  double target() const { return target_; }

 private:
  std::vector<double> observe() const;

  VelocityTrackingParams p_;
  std::mt19937_64 rng_;
  double v_ = 0.0;
  double target_ = 0.0;
  int t_ = 0;
};

}  // namespace eqppo::envsim
