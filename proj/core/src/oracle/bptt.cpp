#include "eqppo/oracle/bptt.hpp"

#include <string>

#include "eqppo/common/errors.hpp"

namespace eqppo::oracle {

using eqprop::hard_sigmoid_prime;
using eqprop::LayeredEnergyNet;
using eqprop::ParamGrads;

namespace {

struct StepRecord {
  std::vector<MatrixD> xi;   // states before the step
  std::vector<MatrixD> pre;  // pre-projection values u, for the projection mask
};

}  // namespace

ParamGrads<double> bptt_equilibrium_grad(const LayeredEnergyNet<double>& net, const MatrixD& input,
                                         const OutputLossGrad& loss_grad, int steps, double eps,
                                         StorageLedger* ledger) {
  if (steps < 1) throw ContractError("bptt needs at least one step");
  if (input.cols() != net.input_size()) throw ContractError("input width does not match layer 0");
  const int L = net.num_layers();
  const auto B = input.rows();
  const auto free_neurons = static_cast<std::uint64_t>(net.num_free_neurons()) * static_cast<std::uint64_t>(B);

  // Forward unroll, storing every state.
  std::vector<StepRecord> tape(static_cast<std::size_t>(steps));
  std::vector<MatrixD> xi(static_cast<std::size_t>(L));
  xi[0] = input;
  for (int l = 1; l < L; ++l) xi[l] = MatrixD::Zero(B, net.layer_sizes[l]);
  if (ledger) ledger->retain(free_neurons);

  for (int t = 0; t < steps; ++t) {
    auto& rec = tape[static_cast<std::size_t>(t)];
    rec.xi = xi;
    rec.pre.resize(static_cast<std::size_t>(L));
    std::vector<MatrixD> rho(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) rho[l] = eqprop::activate(net, l, xi[l]);
    std::vector<MatrixD> next(static_cast<std::size_t>(L));
    next[0] = xi[0];
    for (int l = 1; l < L; ++l) {
      MatrixD drive = rho[l - 1] * net.weights[l - 1];
      if (l + 1 < L) drive.noalias() += rho[l + 1] * net.weights[l].transpose();
      drive.rowwise() += net.bias(l);
      if (net.is_hidden(l)) {
        MatrixD gate = xi[l].unaryExpr([](double x) { return hard_sigmoid_prime(x); });
        MatrixD u = xi[l] + eps * (gate.cwiseProduct(drive) - xi[l]);
        next[l] = u.cwiseMax(0.0).cwiseMin(1.0);
        rec.pre[l] = std::move(u);
      } else {
        next[l] = xi[l] + eps * (drive - xi[l]);
      }
      if (!next[l].allFinite()) {
        throw NumericalError("bptt unroll overflow at step " + std::to_string(t), "step " + std::to_string(t));
      }
    }
    xi = std::move(next);
    if (ledger) ledger->retain(free_neurons);
  }

  // Reverse sweep.
  ParamGrads<double> grads = ParamGrads<double>::zeros_like(net);
  std::vector<MatrixD> g(static_cast<std::size_t>(L));
  for (int l = 1; l < L; ++l) g[l] = MatrixD::Zero(B, net.layer_sizes[l]);
  g[L - 1] = loss_grad(xi[L - 1]) / static_cast<double>(B);

  for (int t = steps - 1; t >= 0; --t) {
    const auto& rec = tape[static_cast<std::size_t>(t)];
    std::vector<MatrixD> rho(static_cast<std::size_t>(L)), drho(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
      rho[l] = eqprop::activate(net, l, rec.xi[l]);
      drho[l] = net.is_hidden(l) ? MatrixD(rec.xi[l].unaryExpr([](double x) { return hard_sigmoid_prime(x); }))
                                 : MatrixD::Ones(B, net.layer_sizes[l]);
    }
    // g_u: gradient w.r.t. the pre-projection update; g_drive: w.r.t. the layer drive.
    std::vector<MatrixD> g_u(static_cast<std::size_t>(L)), g_drive(static_cast<std::size_t>(L));
    for (int l = 1; l < L; ++l) {
      if (net.is_hidden(l)) {
        MatrixD inside = rec.pre[l].unaryExpr([](double u) { return (u > 0.0 && u < 1.0) ? 1.0 : 0.0; });
        g_u[l] = g[l].cwiseProduct(inside);
        g_drive[l] = eps * g_u[l].cwiseProduct(drho[l]);
      } else {
        g_u[l] = g[l];
        g_drive[l] = eps * g_u[l];
      }
      grads.biases[static_cast<std::size_t>(l - 1)] += g_drive[l].colwise().sum();
    }
    for (int k = 0; k + 1 < L; ++k) {
      grads.weights[k].noalias() += rho[k].transpose() * g_drive[k + 1];
      if (k >= 1) grads.weights[k].noalias() += g_drive[k].transpose() * rho[k + 1];
    }
    std::vector<MatrixD> g_prev(static_cast<std::size_t>(L));
    for (int l = 1; l < L; ++l) {
      MatrixD back = (1.0 - eps) * g_u[l];
      MatrixD coupled = MatrixD::Zero(B, net.layer_sizes[l]);
      if (l + 1 < L) coupled.noalias() += g_drive[l + 1] * net.weights[l].transpose();
      if (l - 1 >= 1) coupled.noalias() += g_drive[l - 1] * net.weights[l - 1];
      g_prev[l] = back + coupled.cwiseProduct(drho[l]);
    }
    g = std::move(g_prev);
  }
  return grads;
}

}  // namespace eqppo::oracle
