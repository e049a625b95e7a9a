#include "eqppo/eqprop/gradients.hpp"

#include "eqppo/common/errors.hpp"

namespace eqppo::eqprop {

template <typename T>
ParamGrads<T> estimate_grads(const LayeredEnergyNet<T>& net, const RelaxationState<T>& state_plus,
                             const RelaxationState<T>& state_minus, double beta_ep) {
  if (!(beta_ep > 0.0)) throw ContractError("beta_ep must be positive");
  const int L = net.num_layers();
  if (static_cast<int>(state_plus.states.size()) != L || static_cast<int>(state_minus.states.size()) != L) {
    throw ContractError("relaxation states do not match the network depth");
  }
  for (int l = 0; l < L; ++l) {
    const auto& p = state_plus.states[l];
    const auto& m = state_minus.states[l];
    if (p.rows() != m.rows() || p.cols() != m.cols() || p.cols() != net.layer_sizes[l]) {
      throw ContractError("nudge state shape mismatch in layer " + std::to_string(l));
    }
  }

  const T scale = static_cast<T>(1.0 / (2.0 * beta_ep * static_cast<double>(state_plus.batch())));
  std::vector<Matrix<T>> rp(static_cast<std::size_t>(L)), rm(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    rp[l] = activate(net, l, state_plus.states[l]);
    rm[l] = activate(net, l, state_minus.states[l]);
  }

  ParamGrads<T> g;
  for (int l = 0; l + 1 < L; ++l) {
    Matrix<T> w = rp[l].transpose() * rp[l + 1];
    w.noalias() -= rm[l].transpose() * rm[l + 1];
    g.weights.push_back(scale * w);
  }
  for (int l = 1; l < L; ++l) {
    g.biases.push_back(scale * (rp[l] - rm[l]).colwise().sum());
  }
  return g;
}

template ParamGrads<float> estimate_grads<float>(const LayeredEnergyNet<float>&, const RelaxationState<float>&,
                                                 const RelaxationState<float>&, double);
template ParamGrads<double> estimate_grads<double>(const LayeredEnergyNet<double>&, const RelaxationState<double>&,
                                                   const RelaxationState<double>&, double);

}  // namespace eqppo::eqprop
