#include "eqppo/rl/optim.hpp"

#include "eqppo/common/errors.hpp"

namespace eqppo::rl {

void MomentumSgd::step(VectorD& params, const VectorD& grad) {
  if (grad.size() != params.size()) throw ContractError("sgd gradient size mismatch");
  if (velocity.size() != params.size()) velocity = VectorD::Zero(params.size());
  velocity = momentum * velocity + grad;
  params -= lr * velocity;
}

void Adam::step(VectorD& params, const VectorD& grad) {
  if (grad.size() != params.size()) throw ContractError("adam gradient size mismatch");
  if (m.size() != params.size()) {
    m = VectorD::Zero(params.size());
    v = VectorD::Zero(params.size());
    t = 0;
  }
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace eqppo::rl
