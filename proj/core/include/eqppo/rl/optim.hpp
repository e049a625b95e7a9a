#pragma once

#include "eqppo/common/linalg.hpp"

namespace eqppo::rl {

/// v <- mu v + g; p <- p - lr v.
struct MomentumSgd {
  double lr = 0.1;
  double momentum = 0.9;
  VectorD velocity;

  void step(VectorD& params, const VectorD& grad);
  void reset() { velocity.resize(0); }
};

struct Adam {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  VectorD m;
  VectorD v;
  long long t = 0;

  void step(VectorD& params, const VectorD& grad);
};

}  // namespace eqppo::rl
