#include "eqppo/envsim/walking_test.hpp"

#include <cmath>

#include "eqppo/common/errors.hpp"

namespace eqppo::envsim {

double required_distance(double v_target) { return kBaseDistance * v_target / kBaseSpeed; }

const std::vector<double>& walking_test_speeds() {
  static const std::vector<double> v{0.1, 0.3, 0.5};
  return v;
}

const std::vector<double>& walking_test_heights() {
  static const std::vector<double> h{0.02, 0.04, 0.06, 0.08, 0.10, 0.12};
  return h;
}

WalkingMetrics walking_test(const PolicyFn& cpg_policy, const PolicyFn& res_policy, double v_target, double h_max,
                            int episodes, const WalkingTestConfig& cfg) {
  if (!cpg_policy) throw ConfigError("walking test needs a CPG policy");
  WalkingMetrics m;
  m.v_target = v_target;
  m.h_max = h_max;
  m.required = required_distance(v_target);
  if (episodes <= 0) return m;

  LocomotionConfig lc = cfg.base;
  lc.stage = 2;
  lc.h_max = h_max;
  lc.terrain.side_low = lc.terrain.side_high = cfg.side;
  lc.randomization = DomainRandomization::evaluation();
  lc.fixed_v_target = v_target;
  lc.max_steps = static_cast<int>(std::lround(cfg.time_limit / lc.dt_rl));

  double w_speed = 0, w_power = 0, w_roll = 0, w_pitch = 0, w_roll_rate = 0, w_pitch_rate = 0;
  for (int e = 0; e < episodes; ++e) {
    LocomotionEnv env(lc, env_seed(cfg.seed, e));
    env.reset();
    std::vector<double> res_zero(cpg::kNumJoints, 0.0);
    double power = 0, roll = 0, pitch = 0, roll_rate = 0, pitch_rate = 0;
    bool success = false, fell = false;
    while (true) {
      auto cpg_action = cpg_policy(env.cpg_observation());
      std::vector<double> res_action = res_policy ? res_policy(env.res_observation()) : res_zero;
      StepResult r = env.step_both(cpg_action, res_action);
      const auto& b = env.body();
      power += env.last_info().abs_power;
      roll += std::abs(b.roll);
      pitch += std::abs(b.pitch);
      roll_rate += std::abs(b.roll_rate);
      pitch_rate += std::abs(b.pitch_rate);
      if (r.fall) {
        fell = true;
        break;
      }
      if (env.distance() >= m.required) {
        success = true;
        break;
      }
      if (r.done) break;
    }
    const double n = env.steps();
    const double duration = n * lc.dt_rl;
    m.successes += success;
    m.falls += fell;
    m.total_time += duration;
    // Per-episode means weighted by duration reduce to per-step sums.
    w_speed += env.distance();
    w_power += power * lc.dt_rl;
    w_roll += roll * lc.dt_rl;
    w_pitch += pitch * lc.dt_rl;
    w_roll_rate += roll_rate * lc.dt_rl;
    w_pitch_rate += pitch_rate * lc.dt_rl;
  }
  m.episodes = episodes;
  m.success_rate = static_cast<double>(m.successes) / episodes;
  if (m.total_time > 0) {
    m.speed = w_speed / m.total_time;
    m.power = w_power / m.total_time;
    m.abs_roll = w_roll / m.total_time;
    m.abs_pitch = w_pitch / m.total_time;
    m.abs_roll_rate = w_roll_rate / m.total_time;
    m.abs_pitch_rate = w_pitch_rate / m.total_time;
  }
  return m;
}

}  // namespace eqppo::envsim
