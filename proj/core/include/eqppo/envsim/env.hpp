#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace eqppo::envsim {

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool done = false;
  bool fall = false;
  bool fault = false;  // non-finite state; the episode was aborted
};

/// Episodic continuous-control environment. Each instance owns its RNG.
class Env {
 public:
  virtual ~Env() = default;
  virtual int obs_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual std::vector<double> reset() = 0;
  virtual StepResult step(std::span<const double> action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<Env>(int env_index, std::uint64_t seed)>;

/// Seed of environment `index` under a global seed.
std::uint64_t env_seed(std::uint64_t global_seed, int index);

struct VecStep {
  Eigen::MatrixXd next_obs;  // true successor observations (before auto-reset)
  Eigen::MatrixXd obs;       // observations to act on next (reset where done)
  std::vector<double> reward;
  std::vector<char> done, fall, fault;
};

/// N independent environments stepped in lockstep with automatic reset.
class VecEnv {
 public:
  VecEnv(const EnvFactory& factory, int num_envs, std::uint64_t global_seed);

  int size() const { return static_cast<int>(envs_.size()); }
  int obs_dim() const { return envs_.front()->obs_dim(); }
  int action_dim() const { return envs_.front()->action_dim(); }
  Env& env(int i) { return *envs_[static_cast<std::size_t>(i)]; }

  const Eigen::MatrixXd& reset();
  const Eigen::MatrixXd& observations() const { return obs_; }
  VecStep step(const Eigen::MatrixXd& actions);

 private:
  std::vector<std::unique_ptr<Env>> envs_;
  Eigen::MatrixXd obs_;
};

}  // namespace eqppo::envsim
