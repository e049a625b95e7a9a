#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eqppo/common/linalg.hpp"

namespace eqppo::eqprop {

enum class Activation { kHardSigmoid };

/// Layered energy-based network with one symmetric coupling matrix per
/// adjacent layer pair. Input and output layers use the identity; hidden
/// layers use the hard sigmoid clamp(x, 0, 1).
template <typename T>
struct LayeredEnergyNet {
  std::vector<int> layer_sizes;
  std::vector<Matrix<T>> weights;    // weights[l] is |layer l| x |layer l+1|
  std::vector<RowVector<T>> biases;  // biases[l-1] belongs to layer l (l >= 1)
  Activation activation = Activation::kHardSigmoid;
  std::uint64_t seed = 0;

  int num_layers() const { return static_cast<int>(layer_sizes.size()); }
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  bool is_hidden(int layer) const { return layer > 0 && layer + 1 < num_layers(); }
  const RowVector<T>& bias(int layer) const { return biases[static_cast<std::size_t>(layer - 1)]; }
  RowVector<T>& bias(int layer) { return biases[static_cast<std::size_t>(layer - 1)]; }

  std::size_t num_parameters() const;
  /// Total neurons excluding the clamped input layer.
  std::size_t num_free_neurons() const;

  template <typename U>
  LayeredEnergyNet<U> cast() const {
    LayeredEnergyNet<U> out;
    out.layer_sizes = layer_sizes;
    out.activation = activation;
    out.seed = seed;
    for (const auto& w : weights) out.weights.push_back(w.template cast<U>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<U>());
    return out;
  }
};

/// Parameter gradients laid out like the network parameters.
template <typename T>
struct ParamGrads {
  std::vector<Matrix<T>> weights;
  std::vector<RowVector<T>> biases;

  static ParamGrads zeros_like(const LayeredEnergyNet<T>& net);
  Vector<double> flatten() const;
};

/// Draws every weight from Uniform(-alpha_w/sqrt(fan_left), +alpha_w/sqrt(fan_left));
/// biases start at zero.
template <typename T>
LayeredEnergyNet<T> init_net(std::span<const int> layer_sizes, double alpha_w, std::uint64_t seed);

template <typename T>
Vector<double> flatten_parameters(const LayeredEnergyNet<T>& net);
template <typename T>
void assign_parameters(LayeredEnergyNet<T>& net, const Vector<double>& flat);

/// Fingerprint of the parameter bytes. Equal hashes mean bit-identical parameters.
template <typename T>
std::uint64_t parameter_hash(const LayeredEnergyNet<T>& net);

template <typename T>
inline T hard_sigmoid(T x) {
  return x < T(0) ? T(0) : (x > T(1) ? T(1) : x);
}

/// Subgradient of the hard sigmoid: 1 on the closed interval [0, 1].
template <typename T>
inline T hard_sigmoid_prime(T x) {
  return (x >= T(0) && x <= T(1)) ? T(1) : T(0);
}

/// rho applied to a layer's states; identity on the input and output layers.
template <typename T>
Matrix<T> activate(const LayeredEnergyNet<T>& net, int layer, const Matrix<T>& states);

}  // namespace eqppo::eqprop
