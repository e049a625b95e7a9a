#include "eqppo/envsim/locomotion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eqppo/common/errors.hpp"

namespace eqppo::envsim {

using cpg::kNumJoints;
using cpg::kNumLimbs;

double RandomRange::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return lo + unit(rng) * (hi - lo);
}

DomainRandomization DomainRandomization::stage1() { return {}; }

DomainRandomization DomainRandomization::stage2() {
  DomainRandomization d;
  d.g_c = {0.15, 0.20};
  return d;
}

DomainRandomization DomainRandomization::evaluation() {
  DomainRandomization d;
  d.friction = {1.5, 1.5};
  d.mass_ratio = {1.0, 1.0};
  d.load = {0.0, 0.0};
  d.h = {0.25, 0.25};
  d.g_c = {0.1, 0.1};
  d.g_p = {0.02, 0.02};
  d.push_enabled = false;
  return d;
}

void LocomotionConfig::validate() const {
  if (stage != 1 && stage != 2) throw ConfigError("stage must be 1 or 2");
  if (!(h_max >= kMinBoxHeight)) throw ConfigError("H_max must be at least 1e-4");
  if (max_steps <= 0) throw ConfigError("max_steps must be positive");
  if (!(dt_rl > 0)) throw ConfigError("dt_rl must be positive");
  if (!(v_x_upper >= 0)) throw ConfigError("v_x_upper must be non-negative");
  auto check = [](const RandomRange& r, const char* name) {
    if (!(r.hi >= r.lo)) throw ConfigError(std::string("empty randomization range: ") + name);
  };
  check(randomization.friction, "friction");
  check(randomization.mass_ratio, "mass_ratio");
  check(randomization.load, "load");
  check(randomization.h, "h");
  check(randomization.g_c, "g_c");
  check(randomization.g_p, "g_p");
  for (const auto& leg : controller.legs) leg.validate();
}

bool apply_random_push(SurrogateBody& body, std::mt19937_64& rng, double dt_rl, double interval, double speed) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) >= dt_rl / interval) return false;
  double a = std::numbers::pi * (2.0 * unit(rng) - 1.0);
  body.vx += speed * std::cos(a - body.yaw);
  body.vy += speed * std::sin(a - body.yaw);
  return true;
}

double push_force(double robot_mass, double speed, double dt_low) { return robot_mass * speed / (10.0 * dt_low); }

LocomotionEnv::LocomotionEnv(LocomotionConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
  cfg_.validate();
}

namespace {

// Foot or knee offset from the body origin, body frame.
cpg::Vec3 body_offset(const SurrogateParams& b, int limb, const cpg::Vec3& p) {
  double hx = (limb == cpg::kFR || limb == cpg::kFL) ? b.hip_x[0] : b.hip_x[1];
  double hy = (limb == cpg::kFL || limb == cpg::kRL) ? b.hip_y : -b.hip_y;
  return {hx + p[0], hy + p[1], p[2]};
}

double world_z(const SurrogateBody& s, const cpg::Vec3& r) {
  return s.z - r[0] * std::sin(s.pitch) + r[1] * std::sin(s.roll) + r[2] * std::cos(s.roll) * std::cos(s.pitch);
}

std::array<double, 2> world_xy(const SurrogateBody& s, const cpg::Vec3& r) {
  double c = std::cos(s.yaw), sn = std::sin(s.yaw);
  return {s.x + c * r[0] - sn * r[1], s.y + sn * r[0] + c * r[1]};
}

cpg::Vec3 knee_position(const cpg::LegGeometry& g, const cpg::JointAngles& q) {
  double x = -g.thigh * std::sin(q[1]);
  double zs = -g.thigh * std::cos(q[1]);
  double off = g.signed_offset();
  return {x, off * std::cos(q[0]) - zs * std::sin(q[0]), off * std::sin(q[0]) + zs * std::cos(q[0])};
}

cpg::JointAngles leg_angles(const cpg::JointVector& q, int limb) {
  return {q[3 * limb], q[3 * limb + 1], q[3 * limb + 2]};
}

}  // namespace

std::vector<double> LocomotionEnv::reset() {
  const auto& dr = cfg_.randomization;
  terrain_ = generate_terrain(rng_, cfg_.h_max, cfg_.terrain);

  draw_ = EpisodeDraw{};
  draw_.friction = dr.friction.sample(rng_);
  double ratio_sum = 0.0;
  for (auto& m : draw_.link_mass_ratio) {
    m = dr.mass_ratio.sample(rng_);
    ratio_sum += m;
  }
  draw_.load = dr.load.sample(rng_);
  const double torso = cfg_.body.torso_mass_fraction * kRobotMass;
  draw_.total_mass = torso + (kRobotMass - torso) * ratio_sum / kNumJoints + draw_.load;
  draw_.trajectory = cfg_.controller.trajectory;
  draw_.trajectory.h = dr.h.sample(rng_);
  draw_.trajectory.g_c = dr.g_c.sample(rng_);
  draw_.trajectory.g_p = dr.g_p.sample(rng_);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double v = unit(rng_) * cfg_.v_x_upper;
  draw_.command = {cfg_.fixed_v_target >= 0 ? cfg_.fixed_v_target : v, 0.0, 0.0};

  ctrl_ = cpg::Controller{};
  ctrl_.bank = cpg::trot_init(rng_);
  cfg_.controller.trajectory = draw_.trajectory;
  ctrl_.q_cpg = cpg::cpg_joint_angles(ctrl_, cfg_.controller);
  ctrl_.q_target = ctrl_.q_cpg;
  res_rate_.fill(0.0);

  body_ = SurrogateBody{};
  body_.q = ctrl_.q_cpg;
  settle();
  steps_ = 0;
  distance_ = 0.0;
  info_ = StepInfo{};
  return cfg_.stage == 1 ? cpg_observation() : res_observation();
}

// Drop the body until the lowest foot touches the terrain, with all velocities zero.
void LocomotionEnv::settle() {
  double z = -1e9;
  for (int i = 0; i < kNumLimbs; ++i) {
    auto p = cpg::leg_fk(leg_angles(body_.q, i), cfg_.controller.legs[i]);
    auto r = body_offset(cfg_.body, i, p);
    auto xy = world_xy(body_, r);
    z = std::max(z, terrain_.height_at(xy[0], xy[1]) - r[2]);
    foot_prev_[i] = p;
  }
  body_.z = z;
  for (int i = 0; i < kNumLimbs; ++i) {
    auto r = body_offset(cfg_.body, i, foot_prev_[i]);
    foot_z_prev_[i] = world_z(body_, r);
    auto xy = world_xy(body_, r);
    body_.contact[i] = foot_z_prev_[i] <= terrain_.height_at(xy[0], xy[1]) + 1e-12;
    was_contact_[i] = body_.contact[i];
    air_ticks_[i] = 0;
  }
  body_.accel = {0.0, 0.0, cfg_.body.gravity};
}

void LocomotionEnv::tick(const cpg::PolicyOutputs& out, StepInfo& info) {
  const auto& bp = cfg_.body;
  const auto& cc = cfg_.controller;
  const double dt = cc.dt_low;
  auto tau = cpg::controller_tick(ctrl_, out, body_.q, body_.q_dot, cc);

  double power = 0.0, abs_power = 0.0;
  for (int j = 0; j < kNumJoints; ++j) {
    const auto& leg = cc.legs[j / 3];
    double inertia = bp.joint_inertia * draw_.link_mass_ratio[j];
    body_.q_dot[j] += (tau[j] - bp.joint_damping * body_.q_dot[j]) / inertia * dt;
    body_.q[j] += body_.q_dot[j] * dt;
    double lo = leg.lower_limit[j % 3], hi = leg.upper_limit[j % 3];
    if (body_.q[j] < lo || body_.q[j] > hi) {
      body_.q[j] = std::clamp(body_.q[j], lo, hi);
      body_.q_dot[j] = 0.0;
    }
    power += tau[j] * body_.q_dot[j];
    abs_power += std::abs(tau[j] * body_.q_dot[j]);
  }
  info.power += power;
  info.abs_power += abs_power;

  const double mass = draw_.total_mass;
  const double inertia_scale = mass / kRobotMass;
  double fx = 0.0, fy = 0.0, fz = 0.0, t_roll = 0.0, t_pitch = 0.0, t_yaw = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < kNumLimbs; ++i) {
    auto p = cpg::leg_fk(leg_angles(body_.q, i), cc.legs[i]);
    auto r = body_offset(bp, i, p);
    cpg::Vec3 vf{(p[0] - foot_prev_[i][0]) / dt, (p[1] - foot_prev_[i][1]) / dt, (p[2] - foot_prev_[i][2]) / dt};
    double zf = world_z(body_, r);
    double zf_dot = (zf - foot_z_prev_[i]) / dt;
    auto xy = world_xy(body_, r);
    double pen = terrain_.height_at(xy[0], xy[1]) - zf;
    double normal_force = 0.0;
    if (pen > 0.0) normal_force = std::clamp(bp.contact_stiffness * pen - bp.contact_damping * zf_dot, 0.0, bp.max_normal_force);
    bool in_contact = normal_force > bp.contact_threshold;
    bool touchdown = in_contact && !was_contact_[i] && air_ticks_[i] >= kMinAirTicks;
    air_ticks_[i] = in_contact ? 0 : air_ticks_[i] + 1;
    if (touchdown) {
      // Touchdown: stumble probability grows with the local height spread.
      double spread = terrain_.local_std(xy[0], xy[1]);
      double p_stumble = std::min(1.0, bp.stumble_gain * spread / std::max(draw_.trajectory.g_c, 1e-3));
      double u = unit(rng_);
      double k_roll = normal(rng_), k_pitch = normal(rng_);
      if (u < p_stumble) {
        double kick = bp.stumble_kick * spread / 0.035;
        body_.roll_rate += kick * k_roll;
        body_.pitch_rate += kick * k_pitch;
        body_.vx *= bp.stumble_speed_loss;
        ++info.stumbles;
      }
    }
    was_contact_[i] = in_contact;
    body_.contact[i] = in_contact;

    if (normal_force > 0.0) {
      double ux = body_.vx + vf[0] - body_.yaw_rate * r[1];
      double uy = body_.vy + vf[1] + body_.yaw_rate * r[0];
      double tx = -bp.traction_gain * ux, ty = -bp.traction_gain * uy;
      double cap = draw_.friction * normal_force;
      double mag = std::hypot(tx, ty);
      if (mag > cap) {
        tx *= cap / mag;
        ty *= cap / mag;
      }
      fx += tx;
      fy += ty;
      fz += normal_force;
      t_roll += r[1] * normal_force - r[2] * ty;
      t_pitch += r[2] * tx - r[0] * normal_force;
      t_yaw += r[0] * ty - r[1] * tx;
    }
    foot_prev_[i] = p;
    foot_z_prev_[i] = zf;
  }

  double drag = bp.base_drag + bp.terrain_drag * terrain_.local_std(body_.x, body_.y);
  double ax = fx / mass - drag * body_.vx + body_.yaw_rate * body_.vy;
  double ay = fy / mass - drag * body_.vy - body_.yaw_rate * body_.vx;
  double az = fz / mass - bp.gravity;
  body_.vx += ax * dt;
  body_.vy += ay * dt;
  body_.vz += az * dt;
  t_roll -= bp.attitude_stiffness * body_.roll;
  t_pitch -= bp.attitude_stiffness * body_.pitch;
  body_.roll_rate += (t_roll - bp.attitude_damping * body_.roll_rate) / (bp.inertia[0] * inertia_scale) * dt;
  body_.pitch_rate += (t_pitch - bp.attitude_damping * body_.pitch_rate) / (bp.inertia[1] * inertia_scale) * dt;
  body_.yaw_rate += (t_yaw - bp.yaw_damping * body_.yaw_rate) / (bp.inertia[2] * inertia_scale) * dt;

  double c = std::cos(body_.yaw), s = std::sin(body_.yaw);
  body_.x += (c * body_.vx - s * body_.vy) * dt;
  body_.y += (s * body_.vx + c * body_.vy) * dt;
  body_.z += body_.vz * dt;
  body_.roll = cpg::wrap_angle(body_.roll + body_.roll_rate * dt);
  body_.pitch = cpg::wrap_angle(body_.pitch + body_.pitch_rate * dt);
  body_.yaw = cpg::wrap_angle(body_.yaw + body_.yaw_rate * dt);
  distance_ += body_.vx * dt;
}

bool LocomotionEnv::fallen() const {
  const auto& bp = cfg_.body;
  if (std::abs(body_.roll) > bp.fall_attitude || std::abs(body_.pitch) > bp.fall_attitude) return true;
  if (body_.z - terrain_.height_at(body_.x, body_.y) < bp.torso_clearance) return true;
  for (int i = 0; i < kNumLimbs; ++i) {
    auto r = body_offset(bp, i, knee_position(cfg_.controller.legs[i], leg_angles(body_.q, i)));
    auto xy = world_xy(body_, r);
    if (world_z(body_, r) < terrain_.height_at(xy[0], xy[1])) return true;
  }
  return false;
}

bool LocomotionEnv::finite() const {
  const auto& b = body_;
  for (double v : {b.x, b.y, b.z, b.roll, b.pitch, b.yaw, b.vx, b.vy, b.vz, b.roll_rate, b.pitch_rate, b.yaw_rate})
    if (!std::isfinite(v)) return false;
  for (int j = 0; j < kNumJoints; ++j)
    if (!std::isfinite(b.q[j]) || !std::isfinite(b.q_dot[j])) return false;
  return true;
}

StepResult LocomotionEnv::step_both(std::span<const double> cpg_action, std::span<const double> res_action) {
  cpg::PolicyOutputs out;
  out.cpg = cpg::map_cpg_action(cpg_action);
  if (cfg_.stage == 2) out.res_rate = cpg::map_res_action(res_action, cfg_.controller.res_rate_limit);
  res_rate_ = out.res_rate;

  StepInfo info;
  const auto& dr = cfg_.randomization;
  if (dr.push_enabled && apply_random_push(body_, rng_, cfg_.dt_rl, dr.push_interval, dr.push_speed)) ++info.pushes;

  const double v0[3] = {body_.vx, body_.vy, body_.vz};
  const int ticks = cfg_.controller.ticks_per_action;
  bool ok = true;
  for (int k = 0; k < ticks && ok; ++k) {
    tick(out, info);
    ok = finite();
  }
  info.power /= ticks;
  info.abs_power /= ticks;

  StepResult result;
  ++steps_;
  if (!ok) {
    result.fault = true;
    result.done = true;
    result.fall = true;
    result.obs.assign(static_cast<std::size_t>(obs_dim()), 0.0);
    info_ = info;
    return result;
  }

  const double g = cfg_.body.gravity;
  body_.accel = {(body_.vx - v0[0]) / cfg_.dt_rl - g * std::sin(body_.pitch),
                 (body_.vy - v0[1]) / cfg_.dt_rl + g * std::sin(body_.roll),
                 (body_.vz - v0[2]) / cfg_.dt_rl + g * std::cos(body_.roll) * std::cos(body_.pitch)};

  BodyRates rates{body_.vx, body_.vy, body_.vz, body_.roll_rate, body_.pitch_rate, body_.yaw_rate};
  info.reward = reward(rates, draw_.command, info.power, cfg_.dt_rl, cfg_.stage);
  info_ = info;

  result.reward = info.reward.total;
  result.fall = fallen();
  result.done = result.fall || steps_ >= cfg_.max_steps;
  result.obs = cfg_.stage == 1 ? cpg_observation() : res_observation();
  return result;
}

StepResult LocomotionEnv::step(std::span<const double> action) {
  static const std::vector<double> zeros(kNumJoints, 0.0);
  if (cfg_.stage == 1) return step_both(action, zeros);
  if (driver_) {
    auto cpg_action = driver_(cpg_observation());
    return step_both(cpg_action, action);
  }
  return step_both(zeros, action);
}

std::vector<double> LocomotionEnv::cpg_observation() const {
  std::vector<double> o;
  o.reserve(kResObsDim);
  o.insert(o.end(), body_.q.begin(), body_.q.end());
  o.insert(o.end(), body_.q_dot.begin(), body_.q_dot.end());
  o.push_back(body_.roll);
  o.push_back(body_.pitch);
  o.push_back(body_.roll_rate);
  o.push_back(body_.pitch_rate);
  o.push_back(body_.yaw_rate);
  o.insert(o.end(), body_.accel.begin(), body_.accel.end());
  for (bool c : body_.contact) o.push_back(c ? 1.0 : 0.0);
  for (const auto& s : ctrl_.bank.limbs) {
    o.push_back(s.r);
    o.push_back(s.r_dot);
    o.push_back(std::sin(s.theta));
    o.push_back(std::cos(s.theta));
    o.push_back(std::sin(s.phi));
    o.push_back(std::cos(s.phi));
  }
  o.push_back(draw_.command.vx);
  o.push_back(draw_.command.vy);
  o.push_back(draw_.command.yaw_rate);
  return o;
}

std::vector<double> LocomotionEnv::res_observation() const {
  auto o = cpg_observation();
  o.insert(o.end(), ctrl_.residual.q_res.begin(), ctrl_.residual.q_res.end());
  o.insert(o.end(), res_rate_.begin(), res_rate_.end());
  return o;
}

}  // namespace eqppo::envsim
