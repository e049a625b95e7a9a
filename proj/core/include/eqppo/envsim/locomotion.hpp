#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "eqppo/cpg/controller.hpp"
#include "eqppo/envsim/env.hpp"
#include "eqppo/envsim/reward.hpp"
#include "eqppo/envsim/terrain.hpp"

namespace eqppo::envsim {

inline constexpr int kCpgObsDim = 63;
inline constexpr int kResObsDim = 87;
inline constexpr double kRobotMass = 12.454;

struct RandomRange {
  double lo = 0.0;
  double hi = 0.0;
  double sample(std::mt19937_64& rng) const;
};

struct DomainRandomization {
  RandomRange friction{0.5, 2.5};
  RandomRange mass_ratio{0.5, 1.5};  // per limb link
  RandomRange load{0.0, 5.0};        // kg on the torso
  RandomRange h{0.22, 0.32};
  RandomRange g_c{0.03, 0.20};
  RandomRange g_p{0.0, 0.02};
  bool push_enabled = true;
  double push_interval = 5.0;  // s, mean of the Poisson train
  double push_speed = 0.5;     // m/s

  static DomainRandomization stage1();
  static DomainRandomization stage2();
  /// Fixed walking-test values: friction 1.5, mass ratio 1, no load,
  /// h 0.25, g_c 0.1, g_p 0.02, pushes off.
  static DomainRandomization evaluation();
};

/// Reduced-order body model coefficients. Everything the surrogate invents lives here.
struct SurrogateParams {
  double gravity = 9.81;
  double torso_mass_fraction = 0.38;  // of the nominal robot mass; the rest is limb links
  double joint_inertia = 0.02;        // kg m^2 per joint at mass ratio 1
  double joint_damping = 0.05;
  std::array<double, 2> hip_x{0.183, -0.183};  // front, rear
  double hip_y = 0.047;
  double contact_stiffness = 2.0e4;  // N/m per foot
  double contact_damping = 400.0;    // N s/m per foot
  double max_normal_force = 300.0;   // N per foot
  double traction_gain = 300.0;      // N s/m per foot, before the friction cone
  double contact_threshold = 0.1;    // N for the binary contact observation
  std::array<double, 3> inertia{0.15, 0.30, 0.40};  // roll, pitch, yaw at nominal mass
  double attitude_stiffness = 30.0;  // N m/rad, support-polygon balance the point feet lack
  double attitude_damping = 1.5;     // N m s/rad
  double yaw_damping = 1.0;
  double base_drag = 0.5;            // 1/s
  double terrain_drag = 20.0;        // 1/s per metre of local height std
  double stumble_gain = 6.0;         // touchdown stumble probability per (local std / g_c)
  double stumble_kick = 2.5;         // rad/s attitude-rate kick per 0.035 m local std
  double stumble_speed_loss = 0.5;   // fraction of forward speed kept after a stumble
  double fall_attitude = 0.8;        // rad
  double torso_clearance = 0.08;     // m above the local terrain
};

struct LocomotionConfig {
  int stage = 1;                 // 1: action is the CPG command; 2: action is the RES rate
  double h_max = kMinBoxHeight;  // 0.12 in stage-2 training
  TerrainBounds terrain{};
  DomainRandomization randomization = DomainRandomization::stage1();
  double v_x_upper = 0.5;
  double fixed_v_target = -1.0;  // >= 0 overrides the per-episode draw
  int max_steps = 2000;
  double dt_rl = 0.01;
  cpg::ControllerConfig controller{};
  SurrogateParams body{};
  void validate() const;
};

/// Full body state. Positions in the world frame, velocities in the body frame.
struct SurrogateBody {
  double x = 0.0, y = 0.0, z = 0.0;
  double roll = 0.0, pitch = 0.0, yaw = 0.0;
  double vx = 0.0, vy = 0.0, vz = 0.0;
  double roll_rate = 0.0, pitch_rate = 0.0, yaw_rate = 0.0;
  cpg::JointVector q{};
  cpg::JointVector q_dot{};
  std::array<bool, 4> contact{};
  std::array<double, 3> accel{};  // IMU specific force, body frame
};

/// Per-episode randomized quantities.
struct EpisodeDraw {
  double friction = 1.5;
  std::array<double, cpg::kNumJoints> link_mass_ratio{};
  double load = 0.0;
  double total_mass = kRobotMass;
  cpg::TrajectoryParams trajectory{};
  Command command{};
};

/// Stage-2 helper: produces the normalized CPG action from the 63-D CPG observation.
using CpgDriver = std::function<std::vector<double>(std::span<const double>)>;

/// Per-step record used by the walking test and diagnostics.
struct StepInfo {
  RewardTerms reward{};
  double power = 0.0;      // mean sum tau q_dot over the ticks
  double abs_power = 0.0;  // mean sum |tau q_dot|
  int stumbles = 0;
  int pushes = 0;
};

class LocomotionEnv : public Env {
 public:
  LocomotionEnv(LocomotionConfig cfg, std::uint64_t seed);

  int obs_dim() const override { return cfg_.stage == 1 ? kCpgObsDim : kResObsDim; }
  int action_dim() const override { return cpg::kNumJoints; }
  std::vector<double> reset() override;
  StepResult step(std::span<const double> action) override;

  void set_cpg_driver(CpgDriver driver) { driver_ = std::move(driver); }

  /// Stage-independent stepping: normalized CPG and RES actions in [-1, 1].
  StepResult step_both(std::span<const double> cpg_action, std::span<const double> res_action);

  std::vector<double> cpg_observation() const;
  std::vector<double> res_observation() const;

  const SurrogateBody& body() const { return body_; }
  const cpg::Controller& controller() const { return ctrl_; }
  const EpisodeDraw& draw() const { return draw_; }
  const TerrainField& terrain() const { return terrain_; }
  const LocomotionConfig& config() const { return cfg_; }
  const StepInfo& last_info() const { return info_; }
  int steps() const { return steps_; }
  double distance() const { return distance_; }

 private:
  void settle();
  void tick(const cpg::PolicyOutputs& out, StepInfo& info);
  bool fallen() const;
  bool finite() const;
  void push(StepInfo& info);

  LocomotionConfig cfg_;
  std::mt19937_64 rng_;
  CpgDriver driver_;
  TerrainField terrain_;
  EpisodeDraw draw_;
  SurrogateBody body_;
  cpg::Controller ctrl_;
  cpg::JointVector res_rate_{};
  std::array<cpg::Vec3, 4> foot_prev_{};
  std::array<double, 4> foot_z_prev_{};
  std::array<bool, 4> was_contact_{};
  std::array<int, 4> air_ticks_{};  // touchdowns need this many airborne ticks first
  static constexpr int kMinAirTicks = 20;
  StepInfo info_;
  int steps_ = 0;
  double distance_ = 0.0;
};

/// Random push: Bernoulli(dt_rl / interval) per RL step; on trigger the
/// horizontal velocity jumps by `speed` in a uniformly random world direction.
/// Returns true if a push was applied.
bool apply_random_push(SurrogateBody& body, std::mt19937_64& rng, double dt_rl, double interval = 5.0,
                       double speed = 0.5);

/// Force that would deliver the same impulse over 10 low-level steps.
double push_force(double robot_mass, double speed = 0.5, double dt_low = 0.001);

}  // namespace eqppo::envsim
