#include "eqppo/rl/logstd.hpp"

#include <cmath>

#include "eqppo/common/errors.hpp"
#include "eqppo/rl/gaussian.hpp"

namespace eqppo::rl {

RowVectorD logstd_objective_grad(const MatrixD& mu_free, const PolicyBatch& batch, double epsilon) {
  if (mu_free.rows() != batch.actions.rows() || mu_free.cols() != batch.actions.cols()) {
    throw ContractError("logstd_objective_grad dimension mismatch");
  }
  const int n = batch.size();
  if (n == 0) return RowVectorD::Zero(batch.log_sigma.size());
  const VectorD log_r = log_nudging_ratio(mu_free, batch.actions, batch.log_sigma, batch.log_prob_rollout);
  const RowVectorD inv_var = (-2.0 * batch.log_sigma.array()).exp().matrix();
  RowVectorD g = RowVectorD::Zero(batch.log_sigma.size());
  for (int t = 0; t < n; ++t) {
    if (!one_sided_mask(log_r[t], batch.advantages[t], epsilon)) continue;
    const double w = std::exp(log_r[t]) * batch.advantages[t];
    const RowVectorD bracket = ((batch.actions.row(t) - mu_free.row(t)).array().square() * inv_var.array() - 1.0).matrix();
    g += w * bracket;
  }
  return g / static_cast<double>(n);
}

RowVectorD entropy_loss_grad(const RowVectorD& log_sigma, double k_entropy, double h_target) {
  return RowVectorD::Constant(log_sigma.size(), 2.0 * k_entropy * (gaussian_entropy(log_sigma) - h_target));
}

RowVectorD logstd_update(const MatrixD& mu_free, const PolicyBatch& batch, double epsilon, double k_entropy,
                         double h_target) {
  return -logstd_objective_grad(mu_free, batch, epsilon) + entropy_loss_grad(batch.log_sigma, k_entropy, h_target);
}

}  // namespace eqppo::rl
