#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <random>
#include <vector>

#include "eqppo/envsim/env.hpp"
#include "eqppo/harness/checkpoint.hpp"
#include "eqppo/rl/gae.hpp"

namespace eqppo::harness {

/// One row per rollout update.
struct UpdateMetrics {
  long long update = 0;
  long long samples = 0;
  double mean_reward = 0.0;    // mean per-step reward over the rollout
  double episode_return = 0.0; // mean return of episodes that ended in the rollout
  int episodes = 0;
  int faults = 0;
  double value_mse = 0.0;      // mean pre-step MSE over the first value epoch
  double kl = 0.0;             // last KL computed in the policy epochs
  int epochs_run = 0;
  double lr_policy = 0.0;      // after the safeguard
  double entropy = 0.0;
  double entropy_target = 0.0;
  bool rolled_back = false;
  bool rollback_verified = true;  // restored hashes equal the snapshot hashes
  long long rollbacks = 0;        // cumulative
  double steps_mean = 0.0;        // free-phase steps to convergence, converged samples only
  double pct_converged = 0.0;     // within the training free-phase budget
  double probe_steps_mean = 0.0;  // convergence probe with conv_probe_steps
  double probe_pct_converged = 0.0;
  double seconds = 0.0;
};

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const UpdateMetrics& m);

struct SafeguardDecision {
  bool rollback = false;
  double lr = 0.0;
};

/// Adaptive learning rate and rollback rule applied after the policy epochs.
SafeguardDecision kl_safeguard(double kl, double lr, const TrainerConfig& cfg);

/// Environment factory for the configured task. Stage 2 attaches `cpg`
/// as the CPG driver of every environment.
envsim::EnvFactory make_env_factory(const TrainerConfig& cfg, envsim::PolicyFn cpg = {});

/// One flattened rollout (env-major), preprocessed with the statistics in
/// force during collection.
struct RolloutData {
  MatrixD inputs;
  MatrixD actions;
  MatrixD rollout_means;
  VectorD log_prob_rollout;
  VectorD returns;
  VectorD advantages;  // normalized
  MatrixD raw_obs;

  int size() const { return static_cast<int>(inputs.rows()); }
  /// Mini-batch view for the policy objective under `log_sigma`.
  rl::PolicyBatch policy_batch(const std::vector<int>& rows, const RowVectorD& log_sigma) const;
  MatrixD input_rows(const std::vector<int>& rows) const;
};

class Trainer {
 public:
  /// Fresh run. Stage 2 loads cfg.cpg_checkpoint; a missing file is a ConfigError.
  explicit Trainer(TrainerConfig cfg);
  /// Fresh run on a custom environment.
  Trainer(TrainerConfig cfg, envsim::EnvFactory factory);
  /// Resume from a bundle.
  explicit Trainer(TrainingState state);

  bool finished() const { return state_.samples >= state_.config.max_training_samples; }
  /// Collects one rollout and runs one update.
  UpdateMetrics update();
  /// Collects one rollout without updating anything but the sample counter
  /// and the environments. `m` receives the rollout statistics.
  RolloutData collect(UpdateMetrics& m);
  /// Updates until the sample budget is spent.
  std::vector<UpdateMetrics> train(const std::function<void(const UpdateMetrics&)>& on_update = {});

  const TrainerConfig& config() const { return state_.config; }
  const TrainingState& state() const { return state_; }
  TrainingState& mutable_state() { return state_; }
  const Agent& agent() const { return *state_.agent; }
  const rl::RolloutBuffer& last_rollout() const { return buffer_; }
  /// Rollout consumed by the last update.
  const RolloutData& last_data() const { return last_data_; }

  /// Hash of the frozen CPG policy now (stage 2), for checking it never changes.
  std::uint64_t current_cpg_hash() const;

  /// Where a diagnostic dump goes if training hits non-finite values.
  void set_dump_dir(std::filesystem::path dir) { dump_dir_ = std::move(dir); }

 private:
  void init_envs(envsim::EnvFactory factory);
  void collect_rollout(UpdateMetrics& m);
  UpdateMetrics update_impl();
  [[noreturn]] void numerical_failure(const std::string& what, const std::string& where);
  [[noreturn]] void dump_state(const std::string& what, const std::string& where);

  TrainingState state_;
  std::unique_ptr<envsim::VecEnv> envs_;
  std::shared_ptr<const Agent> cpg_agent_;
  rl::RolloutBuffer buffer_{1, 1};
  std::vector<std::vector<VectorD>> rollout_means_;  // [env][t]
  std::vector<double> running_return_;
  std::mt19937_64 rng_;
  RolloutData last_data_;
  std::filesystem::path dump_dir_;
};

}  // namespace eqppo::harness
