#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "eqppo/common/linalg.hpp"
#include "eqppo/eqprop/energy_net.hpp"
#include "eqppo/harness/config.hpp"
#include "eqppo/oracle/mlp.hpp"
#include "eqppo/rl/clip.hpp"
#include "eqppo/rl/optim.hpp"

namespace eqppo::harness {

struct PolicyStepResult {
  MatrixD mu_free;  // policy means at the free equilibrium (forward pass for BP)
  /// Free-phase steps to convergence per sample, -1 when not converged.
  std::vector<int> steps_to_convergence;
};

/// Actor-critic pair with its optimizers. Inputs are preprocessed
/// observations, one sample per row.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual Algorithm algorithm() const = 0;
  virtual int input_dim() const = 0;
  virtual int action_dim() const = 0;

  virtual MatrixD policy_mean(const MatrixD& input) const = 0;
  virtual VectorD value(const MatrixD& input) const = 0;

  /// One optimizer step on the policy objective for a mini-batch.
  virtual PolicyStepResult policy_step(const MatrixD& input, const rl::PolicyBatch& batch,
                                       const rl::ClipConfig& clip) = 0;
  /// One optimizer step on the value loss; returns the pre-step MSE.
  virtual double value_step(const MatrixD& input, const VectorD& returns) = 0;

  virtual double policy_lr() const = 0;
  virtual void set_policy_lr(double lr) = 0;

  /// Opaque copy of the policy parameters and policy optimizer state.
  struct PolicySnapshot {
    VectorD params;
    VectorD opt_a, opt_b;
    long long opt_t = 0;
  };
  virtual PolicySnapshot snapshot_policy() const = 0;
  virtual void restore_policy(const PolicySnapshot& snap) = 0;

  virtual std::uint64_t policy_hash() const = 0;
  virtual std::uint64_t value_hash() const = 0;
  virtual bool finite() const = 0;

  virtual void write(std::ostream& out) const = 0;
  virtual std::unique_ptr<Agent> clone() const = 0;
};

/// Energy-based actor and critic trained with three-phase equilibrium
/// propagation and momentum SGD. States and parameters are float.
class EpAgent final : public Agent {
 public:
  EpAgent(const TrainerConfig& cfg, int input_dim, int action_dim, std::uint64_t seed);
  EpAgent(const TrainerConfig& cfg, eqprop::LayeredEnergyNet<float> policy, eqprop::LayeredEnergyNet<float> value);

  Algorithm algorithm() const override { return Algorithm::kEP; }
  int input_dim() const override { return policy_.input_size(); }
  int action_dim() const override { return policy_.output_size(); }

  MatrixD policy_mean(const MatrixD& input) const override;
  VectorD value(const MatrixD& input) const override;
  PolicyStepResult policy_step(const MatrixD& input, const rl::PolicyBatch& batch,
                               const rl::ClipConfig& clip) override;
  double value_step(const MatrixD& input, const VectorD& returns) override;

  double policy_lr() const override { return policy_opt_.lr; }
  void set_policy_lr(double lr) override { policy_opt_.lr = lr; }

  PolicySnapshot snapshot_policy() const override;
  void restore_policy(const PolicySnapshot& snap) override;

  std::uint64_t policy_hash() const override;
  std::uint64_t value_hash() const override;
  bool finite() const override;

  void write(std::ostream& out) const override;
  static std::unique_ptr<EpAgent> read(std::istream& in, const TrainerConfig& cfg);
  std::unique_ptr<Agent> clone() const override { return std::make_unique<EpAgent>(*this); }

  const eqprop::LayeredEnergyNet<float>& policy_net() const { return policy_; }
  const eqprop::LayeredEnergyNet<float>& value_net() const { return value_; }

  /// Free-phase relaxation of the policy net with a step cap; returns the
  /// per-sample steps to convergence (-1 when not converged).
  std::vector<int> probe_convergence(const MatrixD& input, int max_steps) const;

 private:
  void set_steps(const TrainerConfig& cfg);

  eqprop::LayeredEnergyNet<float> policy_;
  eqprop::LayeredEnergyNet<float> value_;
  rl::MomentumSgd policy_opt_;
  rl::MomentumSgd value_opt_;
  int p_free_, p_pos_, p_neg_, v_free_, v_pos_, v_neg_;
  double eps_ep_, conv_tol_, value_beta_;
};

/// Backprop baseline: tanh MLP actor and critic with Adam, trained on the
/// standard clipped surrogate and the squared value error.
class BpAgent final : public Agent {
 public:
  BpAgent(const TrainerConfig& cfg, int input_dim, int action_dim, std::uint64_t seed);

  Algorithm algorithm() const override { return Algorithm::kBP; }
  int input_dim() const override { return policy_.input_size(); }
  int action_dim() const override { return policy_.output_size(); }

  MatrixD policy_mean(const MatrixD& input) const override;
  VectorD value(const MatrixD& input) const override;
  PolicyStepResult policy_step(const MatrixD& input, const rl::PolicyBatch& batch,
                               const rl::ClipConfig& clip) override;
  double value_step(const MatrixD& input, const VectorD& returns) override;

  double policy_lr() const override { return policy_opt_.lr; }
  void set_policy_lr(double lr) override { policy_opt_.lr = lr; }

  PolicySnapshot snapshot_policy() const override;
  void restore_policy(const PolicySnapshot& snap) override;

  std::uint64_t policy_hash() const override;
  std::uint64_t value_hash() const override;
  bool finite() const override;

  void write(std::ostream& out) const override;
  static std::unique_ptr<BpAgent> read(std::istream& in, const TrainerConfig& cfg);
  std::unique_ptr<Agent> clone() const override { return std::make_unique<BpAgent>(*this); }

 private:
  BpAgent() = default;

  oracle::MlpNet policy_;
  oracle::MlpNet value_;
  rl::Adam policy_opt_;
  rl::Adam value_opt_;
};

std::unique_ptr<Agent> make_agent(const TrainerConfig& cfg, int input_dim, int action_dim, std::uint64_t seed);
/// Reads an agent written by Agent::write; the tag picks the concrete type.
std::unique_ptr<Agent> read_agent(std::istream& in, const TrainerConfig& cfg);

}  // namespace eqppo::harness
