#include "eqppo/oracle/finite_diff.hpp"

#include "eqppo/common/errors.hpp"

namespace eqppo::oracle {

VectorD finite_diff_grad(const std::function<double(const VectorD&)>& f, const VectorD& params, double h) {
  if (!(h > 0.0)) throw ContractError("finite-difference step must be positive");
  VectorD grad(params.size());
  VectorD p = params;
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    p[k] = params[k] + h;
    const double up = f(p);
    p[k] = params[k] - h;
    const double down = f(p);
    p[k] = params[k];
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

double cosine_similarity(const VectorD& a, const VectorD& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return (na == nb) ? 1.0 : 0.0;
  return a.dot(b) / (na * nb);
}

double relative_l2_error(const VectorD& a, const VectorD& b) {
  const double nb = b.norm();
  if (nb == 0.0) return a.norm();
  return (a - b).norm() / nb;
}

}  // namespace eqppo::oracle
