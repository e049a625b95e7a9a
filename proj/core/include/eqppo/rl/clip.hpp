#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "eqppo/common/linalg.hpp"
#include "eqppo/eqprop/three_phase.hpp"

namespace eqppo::rl {

enum class SigmaScaling { kInvSigma, kInvSigmaSq };
enum class MaskMode { kDynamic, kStatic };

std::string to_string(SigmaScaling s);
std::string to_string(MaskMode m);
SigmaScaling parse_sigma_scaling(const std::string& s);
MaskMode parse_mask_mode(const std::string& s);

struct ClipConfig {
  double epsilon = 0.2;
  /// Reverse clip. +infinity gives the one-sided legacy mask.
  double epsilon_rev = 0.7;
  SigmaScaling sigma_scaling = SigmaScaling::kInvSigma;
  MaskMode mask_mode = MaskMode::kDynamic;
  double beta_ep = 0.1;

  void validate() const;
};

/// Two-sided mask on the nudging ratio:
///   A >= 0: r in (1 - eps_rev, 1 + eps);  A < 0: r in (1 - eps, 1 + eps_rev).
bool two_sided_mask(double log_ratio, double advantage, const ClipConfig& cfg);
/// One-sided mask of the plain clipped objective:
///   A >= 0: r in [0, 1 + eps);  A < 0: r in (1 - eps, inf).
bool one_sided_mask(double log_ratio, double advantage, double epsilon);

/// Everything the policy objective needs about a mini-batch.
struct PolicyBatch {
  MatrixD actions;
  VectorD advantages;
  VectorD log_prob_rollout;
  RowVectorD log_sigma;

  int size() const { return static_cast<int>(actions.rows()); }
};

/// Objective gradient mask * (a - xi_out) / sigma^p * A / batch_size. A mask
/// given in `frozen_mask` replaces the per-call dynamic mask.
MatrixD policy_objective_grad(const MatrixD& xi_out, const PolicyBatch& batch, const ClipConfig& cfg,
                              double batch_size, const std::vector<std::uint8_t>* frozen_mask = nullptr);

/// Output force in the energy convention: beta * dL/dxi_out with L = -J and
/// beta = beta_sign * cfg.beta_ep. With beta > 0 and A > 0 it pushes xi_out
/// away from the action.
MatrixD policy_nudge_force(const MatrixD& xi_out, const MatrixD& action, const VectorD& advantage,
                           const RowVectorD& log_sigma, const VectorD& log_prob_rollout, const ClipConfig& cfg,
                           double batch_size, double beta_sign,
                           const std::vector<std::uint8_t>* frozen_mask = nullptr);

/// dJ/dmu of the standard clipped surrogate, the backprop baseline's output
/// gradient: one_sided_mask * r * (a - mu) / sigma^2 * A / batch_size.
MatrixD ppo_surrogate_grad(const MatrixD& mu, const PolicyBatch& batch, double epsilon, double batch_size);

/// Mask frozen at the free equilibrium for the static ablation.
std::vector<std::uint8_t> static_mask(const MatrixD& xi_star, const PolicyBatch& batch, const ClipConfig& cfg);

/// Called once per nudge step with the signed beta of the phase, the step
/// index, log r_nudging per sample and the mask in force.
using NudgeObserver =
    std::function<void(double beta, int step, const VectorD& log_ratio, const std::vector<std::uint8_t>& mask)>;

/// dL/dxi_out factory for eqprop::three_phase on a float policy net.
eqprop::LossGradientFactory<float> policy_loss(const PolicyBatch& batch, const ClipConfig& cfg, double batch_size,
                                               NudgeObserver observer = {});

/// beta * d/dxi of (1/|B|) sum (xi_out - R)^2, i.e. beta * 2 (xi_out - R) / |B|.
MatrixD value_nudge_force(const MatrixD& xi_out, const VectorD& return_target, double batch_size, double beta);

eqprop::LossGradientFactory<float> value_loss(const VectorD& return_target, double batch_size);

}  // namespace eqppo::rl
