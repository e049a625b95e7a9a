#include "eqppo/envsim/velocity_tracking.hpp"

#include <algorithm>
#include <cmath>

#include "eqppo/common/errors.hpp"
#include "eqppo/envsim/reward.hpp"

namespace eqppo::envsim {

VelocityTrackingEnv::VelocityTrackingEnv(VelocityTrackingParams params, std::uint64_t seed)
    : p_(params), rng_(seed) {
  if (!(p_.dt > 0 && p_.lag > 0 && p_.horizon > 0 && p_.d > 0)) throw ConfigError("invalid velocity-tracking parameters");
}

std::vector<double> VelocityTrackingEnv::observe() const { return {v_, target_, v_ - target_}; }

std::vector<double> VelocityTrackingEnv::reset() {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  target_ = unit(rng_) * p_.v_upper;
  v_ = 0.0;
  t_ = 0;
  return observe();
}

StepResult VelocityTrackingEnv::step(std::span<const double> action) {
  if (action.size() != 1) throw ContractError("velocity tracking takes a single action");
  std::normal_distribution<double> noise(0.0, p_.noise);
  double a = std::clamp(action[0], -1.0, 1.0);
  v_ += p_.dt / p_.lag * (p_.action_scale * a - v_) + noise(rng_);
  ++t_;
  StepResult r;
  r.reward = p_.dt * (p_.alpha * closeness(v_ - target_, p_.d) - p_.action_penalty * a * a);
  r.done = t_ >= p_.horizon;
  r.obs = observe();
  return r;
}

}  // namespace eqppo::envsim
