#pragma once

#include <functional>

#include "eqppo/common/linalg.hpp"

namespace eqppo::oracle {

/// Central differences (f(p + h e_k) - f(p - h e_k)) / 2h for every k.
VectorD finite_diff_grad(const std::function<double(const VectorD&)>& f, const VectorD& params, double h = 1e-4);

double cosine_similarity(const VectorD& a, const VectorD& b);
/// ||a - b|| / ||b||, with `b` the reference.
double relative_l2_error(const VectorD& a, const VectorD& b);

}  // namespace eqppo::oracle
