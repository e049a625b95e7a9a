#pragma once

#include "eqppo/eqprop/energy_net.hpp"
#include "eqppo/eqprop/relaxation.hpp"

namespace eqppo::eqprop {

/// Symmetric contrastive estimate of dL/dtheta from the two nudged
/// equilibria, averaged over the batch:
///   dL/dw_ij = [rho(xi_i+) rho(xi_j+) - rho(xi_i-) rho(xi_j-)] / (2 beta)
///   dL/db_i  = [rho(xi_i+) - rho(xi_i-)] / (2 beta)
template <typename T>
ParamGrads<T> estimate_grads(const LayeredEnergyNet<T>& net, const RelaxationState<T>& state_plus,
                             const RelaxationState<T>& state_minus, double beta_ep);

}  // namespace eqppo::eqprop
