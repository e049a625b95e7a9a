#include "eqppo/eqprop/relaxation.hpp"

#include <algorithm>
#include <string>

#include "eqppo/common/errors.hpp"

namespace eqppo::eqprop {

template <typename T>
Matrix<T> NudgeForce<T>::operator()(const Matrix<T>& xi_out, int step) const {
  if (!active()) return Matrix<T>::Zero(xi_out.rows(), xi_out.cols());
  Matrix<T> g = loss_gradient(xi_out, step);
  if (g.rows() != xi_out.rows() || g.cols() != xi_out.cols()) {
    throw ContractError("loss gradient shape does not match the output layer");
  }
  return static_cast<T>(beta) * g;
}

namespace {

template <typename T>
void check_input(const LayeredEnergyNet<T>& net, const Matrix<T>& input) {
  if (input.cols() != net.input_size()) {
    throw ContractError("input width " + std::to_string(input.cols()) + " does not match layer 0 size " +
                        std::to_string(net.input_size()));
  }
  if (input.rows() == 0) throw ContractError("empty input batch");
}

template <typename T>
void check_finite(const std::vector<Matrix<T>>& states, int step) {
  for (std::size_t l = 1; l < states.size(); ++l) {
    if (!all_finite(states[l])) {
      throw NumericalError("non-finite neuron state in layer " + std::to_string(l) + " at step " + std::to_string(step),
                           "layer " + std::to_string(l));
    }
  }
}

// One synchronous Euler step. `drive0` caches input * W0 since the input is clamped.
template <typename T>
std::vector<Matrix<T>> step_states(const LayeredEnergyNet<T>& net, const std::vector<Matrix<T>>& xi,
                                   const Matrix<T>& drive0, const NudgeForce<T>& nudge, T eps, int step) {
  const int L = net.num_layers();
  std::vector<Matrix<T>> rho(static_cast<std::size_t>(L));
  for (int l = 1; l < L; ++l) rho[l] = activate(net, l, xi[l]);

  std::vector<Matrix<T>> next(static_cast<std::size_t>(L));
  next[0] = xi[0];
  for (int l = 1; l < L; ++l) {
    Matrix<T> pre = (l == 1) ? drive0 : Matrix<T>(rho[l - 1] * net.weights[l - 1]);
    if (l + 1 < L) pre.noalias() += rho[l + 1] * net.weights[l].transpose();
    pre.rowwise() += net.bias(l);
    if (net.is_hidden(l)) {
      Matrix<T> gate = xi[l].unaryExpr([](T x) { return hard_sigmoid_prime(x); });
      next[l] = xi[l] + eps * (gate.cwiseProduct(pre) - xi[l]);
      next[l] = next[l].cwiseMax(T(0)).cwiseMin(T(1));
    } else {
      Matrix<T> dxi = pre - xi[l];
      if (nudge.active()) dxi += nudge(xi[l], step);
      next[l] = xi[l] + eps * dxi;
    }
  }
  return next;
}

}  // namespace

template <typename T>
RelaxationState<T> initial_state(const LayeredEnergyNet<T>& net, const Matrix<T>& input) {
  check_input(net, input);
  const int B = static_cast<int>(input.rows());
  RelaxationState<T> s;
  s.states.push_back(input);
  for (int l = 1; l < net.num_layers(); ++l) s.states.push_back(Matrix<T>::Zero(B, net.layer_sizes[l]));
  s.step_count.assign(B, 0);
  s.steps_to_convergence.assign(B, -1);
  s.max_change_history = Matrix<T>::Zero(B, kConvergenceWindow);
  s.history_head = 0;
  s.below_tol_run.assign(B, 0);
  s.converged.assign(B, 0);
  return s;
}

template <typename T>
RelaxationState<T> relax(const LayeredEnergyNet<T>& net, const Matrix<T>& input, const NudgeForce<T>& nudge,
                         const RelaxConfig& cfg, const RelaxationState<T>* start) {
  if (cfg.max_steps < 1) throw ContractError("max_steps must be at least 1");
  if (!(cfg.eps_ep > 0.0 && cfg.eps_ep <= 1.0)) throw ContractError("eps_ep must lie in (0, 1]");
  RelaxationState<T> s = initial_state(net, input);
  if (start != nullptr) {
    if (start->states.size() != s.states.size()) throw ContractError("start state has the wrong number of layers");
    for (std::size_t l = 1; l < s.states.size(); ++l) {
      if (start->states[l].rows() != s.states[l].rows() || start->states[l].cols() != s.states[l].cols()) {
        throw ContractError("start state shape mismatch in layer " + std::to_string(l));
      }
      s.states[l] = start->states[l];
    }
  }

  const int B = s.batch();
  const T eps = static_cast<T>(cfg.eps_ep);
  const Matrix<T> drive0 = input * net.weights[0];
  const int window = std::max(1, cfg.conv_window);

  for (int t = 0; t < cfg.max_steps; ++t) {
    if (cfg.early_exit && std::all_of(s.converged.begin(), s.converged.end(), [](auto c) { return c != 0; })) break;
    std::vector<Matrix<T>> next = step_states(net, s.states, drive0, nudge, eps, t);
    check_finite(next, t);

    Vector<T> max_change = Vector<T>::Zero(B);
    for (std::size_t l = 1; l < next.size(); ++l) {
      max_change = max_change.cwiseMax((next[l] - s.states[l]).cwiseAbs().rowwise().maxCoeff());
    }
    for (int i = 0; i < B; ++i) {
      if (cfg.early_exit && s.converged[i]) {
        for (std::size_t l = 1; l < next.size(); ++l) next[l].row(i) = s.states[l].row(i);
        continue;
      }
      s.step_count[i] += 1;
      s.max_change_history(i, s.history_head % kConvergenceWindow) = max_change[i];
      s.below_tol_run[i] = (max_change[i] < static_cast<T>(cfg.conv_tol)) ? s.below_tol_run[i] + 1 : 0;
      if (s.below_tol_run[i] >= window && s.steps_to_convergence[i] < 0) {
        s.steps_to_convergence[i] = s.step_count[i];
        s.converged[i] = 1;
      }
    }
    s.history_head = (s.history_head + 1) % kConvergenceWindow;
    s.states = std::move(next);
  }
  return s;
}

template <typename T>
std::vector<Matrix<T>> dynamics_step(const LayeredEnergyNet<T>& net, const std::vector<Matrix<T>>& states,
                                     const NudgeForce<T>& nudge, double eps_ep, int step) {
  check_input(net, states.front());
  const Matrix<T> drive0 = states.front() * net.weights[0];
  return step_states(net, states, drive0, nudge, static_cast<T>(eps_ep), step);
}

template <typename T>
Matrix<T> infer(const LayeredEnergyNet<T>& net, const Matrix<T>& input, const RelaxConfig& cfg) {
  return relax(net, input, NudgeForce<T>::none(), cfg).output();
}

#define EQPPO_INSTANTIATE(T)                                                                                    \
  template struct NudgeForce<T>;                                                                                \
  template RelaxationState<T> initial_state<T>(const LayeredEnergyNet<T>&, const Matrix<T>&);                  \
  template RelaxationState<T> relax<T>(const LayeredEnergyNet<T>&, const Matrix<T>&, const NudgeForce<T>&,     \
                                       const RelaxConfig&, const RelaxationState<T>*);                          \
  template std::vector<Matrix<T>> dynamics_step<T>(const LayeredEnergyNet<T>&, const std::vector<Matrix<T>>&, \
                                                   const NudgeForce<T>&, double, int);                          \
  template Matrix<T> infer<T>(const LayeredEnergyNet<T>&, const Matrix<T>&, const RelaxConfig&);

EQPPO_INSTANTIATE(float)
EQPPO_INSTANTIATE(double)
#undef EQPPO_INSTANTIATE

}  // namespace eqppo::eqprop
