#pragma once

#include <functional>

#include "eqppo/eqprop/gradients.hpp"

namespace eqppo::eqprop {

/// Builds the loss gradient for one nudge phase. Receives the cached free
/// equilibrium outputs and the signed beta of the phase, so objectives that
/// freeze quantities at the free equilibrium (static masks) can do so.
template <typename T>
using LossGradientFactory = std::function<LossGradient<T>(const Matrix<T>& xi_star_out, double beta)>;

struct ThreePhaseConfig {
  int steps_free = 30;
  int steps_pos = 20;
  int steps_neg = 10;
  double beta_ep = 0.1;
  double eps_ep = 1.0;
  double conv_tol = 1e-4;
  bool early_exit = false;
};

template <typename T>
struct ThreePhaseResult {
  RelaxationState<T> free_state;
  RelaxationState<T> plus_state;
  RelaxationState<T> minus_state;
  ParamGrads<T> grads;
};

/// Free phase from zeros, then +beta and -beta phases both initialized at
/// the free equilibrium; returns the equilibria and the contrastive grads.
template <typename T>
ThreePhaseResult<T> three_phase(const LayeredEnergyNet<T>& net, const Matrix<T>& input,
                                const LossGradientFactory<T>& loss, const ThreePhaseConfig& cfg);

/// Loss factory for L = 1/2 ||xi_out - y||^2 per sample.
template <typename T>
LossGradientFactory<T> quadratic_loss(const Matrix<T>& targets);

}  // namespace eqppo::eqprop
