#include "eqppo/cpg/controller.hpp"

#include <algorithm>

#include "eqppo/common/errors.hpp"

namespace eqppo::cpg {

ResidualState integrate_residual(const ResidualState& state, const JointVector& q_dot, double dt, double limit) {
  ResidualState out;
  for (int j = 0; j < kNumJoints; ++j)
    out.q_res[j] = std::clamp(state.q_res[j] + q_dot[j] * dt, -limit, limit);
  return out;
}

double pd_torque(double q, double q_target, double q_dot, const PdGains& g) {
  double tau = -g.kp * (q - q_target) - g.kd * q_dot;
  return std::clamp(tau, -g.torque_limit, g.torque_limit);
}

std::array<OscillatorParams, kNumLimbs> map_cpg_action(std::span<const double> u) {
  if (u.size() != 12) throw ContractError("CPG action must have 12 entries");
  std::array<OscillatorParams, kNumLimbs> out;
  for (int i = 0; i < kNumLimbs; ++i) {
    double um = std::clamp(u[i], -1.0, 1.0);
    double uo = std::clamp(u[4 + i], -1.0, 1.0);
    double up = std::clamp(u[8 + i], -1.0, 1.0);
    out[i] = {1.5 + 0.5 * um, 1.5 + 1.5 * uo, 1.5 * up};
  }
  return out;
}

JointVector map_res_action(std::span<const double> u, double rate_limit) {
  if (u.size() != kNumJoints) throw ContractError("RES action must have 12 entries");
  JointVector out;
  for (int j = 0; j < kNumJoints; ++j) out[j] = rate_limit * std::clamp(u[j], -1.0, 1.0);
  return out;
}

JointVector cpg_joint_angles(Controller& ctrl, const ControllerConfig& cfg) {
  JointVector q;
  for (int i = 0; i < kNumLimbs; ++i) {
    const auto& s = ctrl.bank.limbs[i];
    Vec3 foot = hip_frame_target(foot_target(s.r, s.theta, s.phi, cfg.trajectory), cfg.legs[i]);
    bool clamped = false;
    JointAngles qa = leg_ik_clamped(foot, cfg.legs[i], cfg.ik_clamp_fraction, &clamped);
    if (clamped) ++ctrl.ik_clamp_count;
    for (int k = 0; k < 3; ++k) q[3 * i + k] = qa[k];
  }
  return q;
}

JointVector controller_tick(Controller& ctrl, const PolicyOutputs& outputs, const JointVector& q,
                            const JointVector& q_dot, const ControllerConfig& cfg) {
  for (int i = 0; i < kNumLimbs; ++i) ctrl.bank.params[i] = clamp_params(outputs.cpg[i]);
  ctrl.bank = hopf_step(ctrl.bank, cfg.dt_low);
  ctrl.q_cpg = cpg_joint_angles(ctrl, cfg);
  JointVector rate;
  for (int j = 0; j < kNumJoints; ++j)
    rate[j] = std::clamp(outputs.res_rate[j], -cfg.res_rate_limit, cfg.res_rate_limit);
  ctrl.residual = integrate_residual(ctrl.residual, rate, cfg.dt_low, cfg.res_limit);
  JointVector tau;
  for (int j = 0; j < kNumJoints; ++j) {
    ctrl.q_target[j] = ctrl.q_cpg[j] + ctrl.residual.q_res[j];
    tau[j] = pd_torque(q[j], ctrl.q_target[j], q_dot[j], cfg.gains);
  }
  return tau;
}

}  // namespace eqppo::cpg
