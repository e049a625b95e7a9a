#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eqppo/common/linalg.hpp"

namespace eqppo::oracle {

enum class MlpActivation { kTanh, kIdentity };

/// Feed-forward network trained by exact reverse mode. Hidden layers use
/// `hidden_activation`, the output layer is linear.
struct MlpNet {
  std::vector<int> layer_sizes;
  std::vector<MatrixD> weights;    // weights[l] is |layer l| x |layer l+1|
  std::vector<RowVectorD> biases;  // biases[l] feeds layer l+1
  MlpActivation hidden_activation = MlpActivation::kTanh;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  std::size_t num_parameters() const;
};

struct MlpGrads {
  std::vector<MatrixD> weights;
  std::vector<RowVectorD> biases;

  static MlpGrads zeros_like(const MlpNet& net);
  VectorD flatten() const;
};

/// Uniform(+-1/sqrt(fan_in)) weights, zero biases.
MlpNet init_mlp(std::span<const int> layer_sizes, std::uint64_t seed, double scale = 1.0,
                MlpActivation hidden = MlpActivation::kTanh);

MatrixD mlp_forward(const MlpNet& net, const MatrixD& input);

struct MlpForwardBackward {
  MatrixD output;
  MlpGrads grads;
};

/// Output and the gradient of sum(out_grad .* output) w.r.t. every parameter,
/// summed over the batch rows.
MlpForwardBackward mlp_forward_backward(const MlpNet& net, const MatrixD& input, const MatrixD& out_grad);

VectorD flatten_parameters(const MlpNet& net);
void assign_parameters(MlpNet& net, const VectorD& flat);

}  // namespace eqppo::oracle
