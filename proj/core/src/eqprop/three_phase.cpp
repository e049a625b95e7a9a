#include "eqppo/eqprop/three_phase.hpp"

namespace eqppo::eqprop {

template <typename T>
ThreePhaseResult<T> three_phase(const LayeredEnergyNet<T>& net, const Matrix<T>& input,
                                const LossGradientFactory<T>& loss, const ThreePhaseConfig& cfg) {
  RelaxConfig rc;
  rc.eps_ep = cfg.eps_ep;
  rc.conv_tol = cfg.conv_tol;
  rc.early_exit = cfg.early_exit;

  ThreePhaseResult<T> out;
  rc.max_steps = cfg.steps_free;
  out.free_state = relax(net, input, NudgeForce<T>::none(), rc);
  const Matrix<T>& xi_star = out.free_state.output();

  rc.max_steps = cfg.steps_pos;
  NudgeForce<T> plus{cfg.beta_ep, loss(xi_star, cfg.beta_ep)};
  out.plus_state = relax(net, input, plus, rc, &out.free_state);

  rc.max_steps = cfg.steps_neg;
  NudgeForce<T> minus{-cfg.beta_ep, loss(xi_star, -cfg.beta_ep)};
  out.minus_state = relax(net, input, minus, rc, &out.free_state);

  out.grads = estimate_grads(net, out.plus_state, out.minus_state, cfg.beta_ep);
  return out;
}

template <typename T>
LossGradientFactory<T> quadratic_loss(const Matrix<T>& targets) {
  return [targets](const Matrix<T>&, double) -> LossGradient<T> {
    return [targets](const Matrix<T>& xi_out, int) -> Matrix<T> { return xi_out - targets; };
  };
}

template ThreePhaseResult<float> three_phase<float>(const LayeredEnergyNet<float>&, const Matrix<float>&,
                                                    const LossGradientFactory<float>&, const ThreePhaseConfig&);
template ThreePhaseResult<double> three_phase<double>(const LayeredEnergyNet<double>&, const Matrix<double>&,
                                                      const LossGradientFactory<double>&, const ThreePhaseConfig&);
template LossGradientFactory<float> quadratic_loss<float>(const Matrix<float>&);
template LossGradientFactory<double> quadratic_loss<double>(const Matrix<double>&);

}  // namespace eqppo::eqprop
