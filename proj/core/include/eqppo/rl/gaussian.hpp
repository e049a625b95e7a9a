#pragma once

#include "eqppo/common/linalg.hpp"

namespace eqppo::rl {

/// Row-wise log N(action; mean, diag(exp(log_sigma))^2).
VectorD gaussian_log_prob(const MatrixD& action, const MatrixD& mean, const RowVectorD& log_sigma);

/// log r_nudging for every row: log N(action; xi_out, sigma) - log pi_rollout.
VectorD log_nudging_ratio(const MatrixD& xi_out, const MatrixD& action, const RowVectorD& log_sigma,
                          const VectorD& log_prob_rollout);

/// r_nudging = exp(log ratio); clamped to [1e-30, 1e30] for reporting only.
VectorD nudging_ratio(const MatrixD& xi_out, const MatrixD& action, const RowVectorD& log_sigma,
                      const VectorD& log_prob_rollout);

/// H = 1/2 sum_i (log(2 pi e) + 2 log sigma_i).
double gaussian_entropy(const RowVectorD& log_sigma);

/// (1 / (2|D|)) sum_t sum_i (mu_new - mu_old)^2 / sigma_i^2; sigma changes ignored.
double analytic_kl(const MatrixD& mu_new, const MatrixD& mu_old, const RowVectorD& log_sigma);

}  // namespace eqppo::rl
