#pragma once

#include <functional>

#include "eqppo/eqprop/energy_net.hpp"
#include "eqppo/oracle/storage.hpp"

namespace eqppo::oracle {

/// Per-sample dL_i/dxi_out evaluated at the final unrolled state.
using OutputLossGrad = std::function<MatrixD(const MatrixD& xi_out)>;

/// Reverse-mode gradient of (1/B) sum_i L_i(xi_out^T) through `steps` free
/// relaxation steps from zero states, using the same projected Euler map as
/// eqprop::relax. Every intermediate state is stored; `ledger` (optional)
/// receives the count.
eqprop::ParamGrads<double> bptt_equilibrium_grad(const eqprop::LayeredEnergyNet<double>& net, const MatrixD& input,
                                                 const OutputLossGrad& loss_grad, int steps, double eps_ep = 1.0,
                                                 StorageLedger* ledger = nullptr);

}  // namespace eqppo::oracle
