#pragma once

#include "eqppo/rl/clip.hpp"

namespace eqppo::rl {

/// dJ/dlog sigma_i of the clipped objective with r_t taken as a function of
/// sigma only (mu fixed at the free-phase outputs) and one-sided masks:
///   (1/|B|) sum_t mask_t [(a - mu)^2 / sigma^2 - 1] r_t A_t
RowVectorD logstd_objective_grad(const MatrixD& mu_free, const PolicyBatch& batch, double epsilon);

/// d/dlog sigma_i of k (H - H_target)^2, identical across dimensions.
RowVectorD entropy_loss_grad(const RowVectorD& log_sigma, double k_entropy, double h_target);

/// Descent direction for log sigma: -dJ/dlog sigma + entropy loss gradient.
RowVectorD logstd_update(const MatrixD& mu_free, const PolicyBatch& batch, double epsilon, double k_entropy,
                         double h_target);

}  // namespace eqppo::rl
