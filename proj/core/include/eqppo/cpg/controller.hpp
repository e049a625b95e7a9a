#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "eqppo/cpg/kinematics.hpp"
#include "eqppo/cpg/oscillator.hpp"

namespace eqppo::cpg {

using JointVector = std::array<double, kNumJoints>;  // index 3 * limb + {hip, thigh, calf}

struct ResidualState {
  JointVector q_res{};
};

struct PdGains {
  double kp = 100.0;
  double kd = 2.0;
  double torque_limit = 33.5;
};

/// q_res <- clamp(q_res + q_dot dt, -limit, limit), per joint.
ResidualState integrate_residual(const ResidualState& state, const JointVector& q_dot_res, double dt,
                                 double limit = 1.0);

/// clamp(-kp (q - q_target) - kd q_dot, -limit, limit).
double pd_torque(double q, double q_target, double q_dot, const PdGains& gains = {});

struct ControllerConfig {
  double dt_low = 0.001;
  int ticks_per_action = 10;
  double res_limit = 1.0;
  double res_rate_limit = 5.0;
  double ik_clamp_fraction = 0.999;
  PdGains gains{};
  TrajectoryParams trajectory{};
  std::array<LegGeometry, kNumLimbs> legs{leg_geometry(kFR), leg_geometry(kFL), leg_geometry(kRR), leg_geometry(kRL)};
};

/// Low-level controller state for one robot.
struct Controller {
  OscillatorBank bank{};
  ResidualState residual{};
  JointVector q_cpg{};
  JointVector q_target{};
  std::uint64_t ik_clamp_count = 0;
};

/// Policy outputs in physical units (already mapped from the normalized actions).
struct PolicyOutputs {
  std::array<OscillatorParams, kNumLimbs> cpg{};
  JointVector res_rate{};
};

/// Normalized CPG action u in [-1, 1]^12 laid out [mu x4, omega x4, psi x4],
/// mapped affinely onto the command ranges.
std::array<OscillatorParams, kNumLimbs> map_cpg_action(std::span<const double> u);
/// Normalized RES action in [-1, 1]^12 mapped onto [-5, 5] rad/s.
JointVector map_res_action(std::span<const double> u, double rate_limit = 5.0);

/// CPG joint angles for the current oscillator states (no dynamics step).
JointVector cpg_joint_angles(Controller& ctrl, const ControllerConfig& cfg);

/// One 1 ms tick: oscillator step, foot targets, IK, residual integration,
/// then PD torques toward q_cpg + q_res.
JointVector controller_tick(Controller& ctrl, const PolicyOutputs& outputs, const JointVector& q,
                            const JointVector& q_dot, const ControllerConfig& cfg);

}  // namespace eqppo::cpg
