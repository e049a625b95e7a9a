#include "eqppo/rl/clip.hpp"

#include <cmath>

#include "eqppo/common/errors.hpp"
#include "eqppo/rl/gaussian.hpp"

namespace eqppo::rl {

std::string to_string(SigmaScaling s) { return s == SigmaScaling::kInvSigma ? "inv_sigma" : "inv_sigma_sq"; }
std::string to_string(MaskMode m) { return m == MaskMode::kDynamic ? "dynamic" : "static"; }

SigmaScaling parse_sigma_scaling(const std::string& s) {
  if (s == "inv_sigma") return SigmaScaling::kInvSigma;
  if (s == "inv_sigma_sq") return SigmaScaling::kInvSigmaSq;
  throw ConfigError("unknown sigma_scaling '" + s + "' (expected inv_sigma or inv_sigma_sq)");
}

MaskMode parse_mask_mode(const std::string& s) {
  if (s == "dynamic") return MaskMode::kDynamic;
  if (s == "static") return MaskMode::kStatic;
  throw ConfigError("unknown mask_mode '" + s + "' (expected dynamic or static)");
}

void ClipConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("clip epsilon must be positive");
  if (!(epsilon_rev > 0.0)) throw ConfigError("clip epsilon_rev must be positive");
  if (!(beta_ep > 0.0) || !std::isfinite(beta_ep)) throw ConfigError("beta_ep must be positive and finite");
}

namespace {

// log of the lower interval end; -inf when the bound is at or below zero.
double log_lower(double one_minus) { return one_minus > 0.0 ? std::log(one_minus) : -INFINITY; }

}  // namespace

bool two_sided_mask(double log_ratio, double advantage, const ClipConfig& cfg) {
  if (advantage >= 0.0) {
    return log_ratio > log_lower(1.0 - cfg.epsilon_rev) && log_ratio < std::log1p(cfg.epsilon);
  }
  return log_ratio > log_lower(1.0 - cfg.epsilon) && log_ratio < std::log1p(cfg.epsilon_rev);
}

bool one_sided_mask(double log_ratio, double advantage, double epsilon) {
  if (advantage >= 0.0) return log_ratio < std::log1p(epsilon);
  return log_ratio > log_lower(1.0 - epsilon);
}

namespace {

MatrixD masked_grad(const MatrixD& xi_out, const PolicyBatch& b, const ClipConfig& cfg, double batch_size,
                    const std::vector<std::uint8_t>& mask) {
  const double p = cfg.sigma_scaling == SigmaScaling::kInvSigma ? 1.0 : 2.0;
  const RowVectorD scale = (-p * b.log_sigma.array()).exp().matrix();
  MatrixD g = (b.actions - xi_out).array().rowwise() * scale.array();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const double w = mask[static_cast<std::size_t>(i)] ? b.advantages[i] / batch_size : 0.0;
    g.row(i) *= w;
  }
  return g;
}

std::vector<std::uint8_t> dynamic_mask(const VectorD& log_r, const VectorD& adv, const ClipConfig& cfg) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(log_r.size()));
  for (Eigen::Index i = 0; i < log_r.size(); ++i) m[static_cast<std::size_t>(i)] = two_sided_mask(log_r[i], adv[i], cfg);
  return m;
}

void check_batch(const MatrixD& xi_out, const PolicyBatch& b) {
  if (xi_out.rows() != b.actions.rows() || xi_out.cols() != b.actions.cols() || b.advantages.size() != xi_out.rows() ||
      b.log_prob_rollout.size() != xi_out.rows() || b.log_sigma.size() != xi_out.cols()) {
    throw ContractError("policy batch dimension mismatch");
  }
}

}  // namespace

MatrixD policy_objective_grad(const MatrixD& xi_out, const PolicyBatch& batch, const ClipConfig& cfg,
                              double batch_size, const std::vector<std::uint8_t>* frozen_mask) {
  check_batch(xi_out, batch);
  if (frozen_mask != nullptr) return masked_grad(xi_out, batch, cfg, batch_size, *frozen_mask);
  const VectorD log_r = log_nudging_ratio(xi_out, batch.actions, batch.log_sigma, batch.log_prob_rollout);
  return masked_grad(xi_out, batch, cfg, batch_size, dynamic_mask(log_r, batch.advantages, cfg));
}

MatrixD policy_nudge_force(const MatrixD& xi_out, const MatrixD& action, const VectorD& advantage,
                           const RowVectorD& log_sigma, const VectorD& log_prob_rollout, const ClipConfig& cfg,
                           double batch_size, double beta_sign, const std::vector<std::uint8_t>* frozen_mask) {
  PolicyBatch b{action, advantage, log_prob_rollout, log_sigma};
  const double beta = beta_sign * cfg.beta_ep;
  return -beta * policy_objective_grad(xi_out, b, cfg, batch_size, frozen_mask);
}

MatrixD ppo_surrogate_grad(const MatrixD& mu, const PolicyBatch& batch, double epsilon, double batch_size) {
  check_batch(mu, batch);
  const VectorD log_r = log_nudging_ratio(mu, batch.actions, batch.log_sigma, batch.log_prob_rollout);
  const RowVectorD inv_var = (-2.0 * batch.log_sigma.array()).exp().matrix();
  MatrixD g = (batch.actions - mu).array().rowwise() * inv_var.array();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const double a = batch.advantages[i];
    g.row(i) *= one_sided_mask(log_r[i], a, epsilon) ? std::exp(log_r[i]) * a / batch_size : 0.0;
  }
  return g;
}

std::vector<std::uint8_t> static_mask(const MatrixD& xi_star, const PolicyBatch& batch, const ClipConfig& cfg) {
  check_batch(xi_star, batch);
  const VectorD log_r = log_nudging_ratio(xi_star, batch.actions, batch.log_sigma, batch.log_prob_rollout);
  std::vector<std::uint8_t> m(static_cast<std::size_t>(log_r.size()));
  for (Eigen::Index i = 0; i < log_r.size(); ++i) {
    m[static_cast<std::size_t>(i)] = one_sided_mask(log_r[i], batch.advantages[i], cfg.epsilon);
  }
  return m;
}

eqprop::LossGradientFactory<float> policy_loss(const PolicyBatch& batch, const ClipConfig& cfg, double batch_size,
                                               NudgeObserver observer) {
  return [batch, cfg, batch_size, observer](const MatrixF& xi_star, double beta) -> eqprop::LossGradient<float> {
    std::vector<std::uint8_t> frozen;
    if (cfg.mask_mode == MaskMode::kStatic) frozen = static_mask(xi_star.cast<double>(), batch, cfg);
    return [batch, cfg, batch_size, observer, beta, frozen](const MatrixF& xi_out, int step) -> MatrixF {
      const MatrixD xi = xi_out.cast<double>();
      check_batch(xi, batch);
      const VectorD log_r = log_nudging_ratio(xi, batch.actions, batch.log_sigma, batch.log_prob_rollout);
      const std::vector<std::uint8_t> mask =
          cfg.mask_mode == MaskMode::kStatic ? frozen : dynamic_mask(log_r, batch.advantages, cfg);
      if (observer) observer(beta, step, log_r, mask);
      // L = -J, so dL/dxi = -dJ/dxi.
      return (-masked_grad(xi, batch, cfg, batch_size, mask)).cast<float>();
    };
  };
}

MatrixD value_nudge_force(const MatrixD& xi_out, const VectorD& return_target, double batch_size, double beta) {
  if (xi_out.cols() != 1 || xi_out.rows() != return_target.size()) throw ContractError("value output shape mismatch");
  return beta * 2.0 * (xi_out.col(0) - return_target) / batch_size;
}

eqprop::LossGradientFactory<float> value_loss(const VectorD& return_target, double batch_size) {
  const MatrixF target = return_target.cast<float>();
  return [target, batch_size](const MatrixF&, double) -> eqprop::LossGradient<float> {
    return [target, batch_size](const MatrixF& xi_out, int) -> MatrixF {
      if (xi_out.cols() != 1 || xi_out.rows() != target.rows()) throw ContractError("value output shape mismatch");
      return static_cast<float>(2.0 / batch_size) * (xi_out - target);
    };
  };
}

}  // namespace eqppo::rl
