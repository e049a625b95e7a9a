#include "eqppo/rl/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "eqppo/common/errors.hpp"

namespace eqppo::rl {

VectorD gaussian_log_prob(const MatrixD& action, const MatrixD& mean, const RowVectorD& log_sigma) {
  if (action.rows() != mean.rows() || action.cols() != mean.cols() || action.cols() != log_sigma.size()) {
    throw ContractError("gaussian_log_prob dimension mismatch");
  }
  const RowVectorD inv_sigma = (-log_sigma.array()).exp().matrix();
  const double norm = -log_sigma.sum() - 0.5 * static_cast<double>(action.cols()) * std::log(2.0 * std::numbers::pi);
  MatrixD z = (action - mean).array().rowwise() * inv_sigma.array();
  return (-0.5 * z.array().square().rowwise().sum() + norm).matrix();
}

VectorD log_nudging_ratio(const MatrixD& xi_out, const MatrixD& action, const RowVectorD& log_sigma,
                          const VectorD& log_prob_rollout) {
  if (log_prob_rollout.size() != xi_out.rows()) throw ContractError("log_prob_rollout length mismatch");
  return gaussian_log_prob(action, xi_out, log_sigma) - log_prob_rollout;
}

VectorD nudging_ratio(const MatrixD& xi_out, const MatrixD& action, const RowVectorD& log_sigma,
                      const VectorD& log_prob_rollout) {
  const double lo = std::log(1e-30), hi = std::log(1e30);
  return log_nudging_ratio(xi_out, action, log_sigma, log_prob_rollout).cwiseMax(lo).cwiseMin(hi).array().exp();
}

double gaussian_entropy(const RowVectorD& log_sigma) {
  const double per_dim = std::log(2.0 * std::numbers::pi * std::numbers::e);
  return 0.5 * (static_cast<double>(log_sigma.size()) * per_dim + 2.0 * log_sigma.sum());
}

double analytic_kl(const MatrixD& mu_new, const MatrixD& mu_old, const RowVectorD& log_sigma) {
  if (mu_new.rows() != mu_old.rows() || mu_new.cols() != mu_old.cols() || mu_new.cols() != log_sigma.size()) {
    throw ContractError("analytic_kl dimension mismatch");
  }
  if (mu_new.rows() == 0) return 0.0;
  const RowVectorD inv_var = (-2.0 * log_sigma.array()).exp().matrix();
  const double s = ((mu_new - mu_old).array().square().rowwise() * inv_var.array()).sum();
  return s / (2.0 * static_cast<double>(mu_new.rows()));
}

}  // namespace eqppo::rl
