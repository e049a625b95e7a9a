#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "eqppo/common/linalg.hpp"

namespace eqppo::rl {

struct Transition {
  VectorD obs;
  VectorD action;
  double reward = 0.0;
  double log_prob_rollout = 0.0;
  bool done = false;
  bool fall = false;
  double value = 0.0;
  double next_value = 0.0;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// Generalized advantage estimation over one environment's time-ordered
/// transitions. A fall removes the bootstrap; any done cuts the recursion.
GaeResult gae(std::span<const Transition> transitions, double gamma, double lambda);

/// Storage for N environments x T steps, indexed [env][t].
class RolloutBuffer {
 public:
  RolloutBuffer(int num_envs, int horizon);

  void clear();
  void add(int env, Transition tr);
  int num_envs() const { return num_envs_; }
  int horizon() const { return horizon_; }
  std::size_t size() const;
  bool full() const;
  const std::vector<Transition>& env(int e) const { return data_[static_cast<std::size_t>(e)]; }

  /// Advantages and returns for all transitions, flattened env-major.
  GaeResult compute_gae(double gamma, double lambda) const;

  /// Debug dump, one row per transition:
  /// env,t,reward,log_prob_rollout,done,fall,value,next_value,obs_0..,action_0..
  void write_csv(std::ostream& out) const;

 private:
  int num_envs_;
  int horizon_;
  std::vector<std::vector<Transition>> data_;
};

}  // namespace eqppo::rl
