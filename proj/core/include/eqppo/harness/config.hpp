#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eqppo/rl/clip.hpp"

namespace eqppo::harness {

enum class Algorithm { kEP, kBP };
enum class TaskKind { kVelocityTracking, kLocomotion };

std::string to_string(Algorithm a);
std::string to_string(TaskKind t);
Algorithm parse_algorithm(const std::string& s);
TaskKind parse_task(const std::string& s);

struct TrainerConfig {
  // Rollout and GAE.
  int num_envs = 16;
  int horizon = 128;
  double gamma = 0.99;
  double lambda = 0.95;
  long long max_training_samples = 200000;

  // Update schedule.
  int epochs = 10;
  int minibatches = 4;
  double kl_target = 0.01;
  double kl_stop = 0.02;
  double kl_rollback = 0.04;
  double lr_decrease_ratio = 2.0;  // decrease when KL > ratio * target
  double lr_increase_ratio = 0.5;  // increase when KL < ratio * target
  double kappa = 1.5;
  double lr_policy = 0.1;
  double lr_policy_lower = 1e-6;
  double lr_policy_upper = 10.0;
  double lr_value = 0.1;
  double momentum = 0.9;

  // Log-std.
  double lr_logstd = 3e-4;
  double entropy_initial = 17.03;
  double entropy_final = 17.03;
  double k_entropy = 0.01;
  double init_log_std = 0.0;

  // Objective.
  rl::ClipConfig clip{};

  // EP relaxation.
  int policy_steps_free = 30;
  int policy_steps_pos = 20;
  int policy_steps_neg = 10;
  int value_steps_free = 25;
  int value_steps_pos = 15;
  int value_steps_neg = 10;
  double eps_ep = 1.0;
  double conv_tol = 1e-4;
  double alpha_w = 0.5;
  /// Free-phase convergence probe run after each EP update.
  int conv_probe_steps = 50;
  int conv_probe_samples = 256;

  // Networks.
  bool use_idct = true;
  int idct_dim = 1024;
  std::vector<int> hidden{768, 768};
  std::vector<int> bp_hidden{64, 64};
  double bp_lr_policy = 3e-4;
  double bp_lr_value = 1e-3;

  // Run.
  Algorithm algorithm = Algorithm::kEP;
  TaskKind task = TaskKind::kLocomotion;
  int stage = 1;
  double h_max = 0.12;  // stage-2 terrain
  std::uint64_t seed = 1;
  std::string cpg_checkpoint;

  /// Entropy target after `fraction` of the sample budget (linear schedule).
  double entropy_target(double fraction) const;
  void validate() const;
};

/// Table-scale settings for the quadruped task.
TrainerConfig full_profile(int stage);
/// Laptop-scale settings: 16 envs, T = 128, small networks, 2e5 samples on
/// the 1-D velocity-tracking task.
TrainerConfig desk_profile();
TrainerConfig profile(const std::string& name, int stage = 1);

/// INI text with one section per group; keys mirror the hyperparameter names.
std::string to_ini(const TrainerConfig& cfg);
/// Overlays keys from INI text onto `base`. Unknown keys are a ConfigError.
TrainerConfig from_ini(const std::string& text, const TrainerConfig& base);
TrainerConfig load_config(const std::filesystem::path& path, const TrainerConfig& base);
void save_config(const TrainerConfig& cfg, const std::filesystem::path& path);
std::uint64_t config_hash(const TrainerConfig& cfg);

}  // namespace eqppo::harness
