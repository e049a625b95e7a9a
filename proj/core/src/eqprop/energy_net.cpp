#include "eqppo/eqprop/energy_net.hpp"

#include <cmath>
#include <random>
#include <string>

#include "eqppo/common/binary_io.hpp"
#include "eqppo/common/errors.hpp"

namespace eqppo::eqprop {

template <typename T>
std::size_t LayeredEnergyNet<T>::num_parameters() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

template <typename T>
std::size_t LayeredEnergyNet<T>::num_free_neurons() const {
  std::size_t n = 0;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) n += static_cast<std::size_t>(layer_sizes[l]);
  return n;
}

template <typename T>
ParamGrads<T> ParamGrads<T>::zeros_like(const LayeredEnergyNet<T>& net) {
  ParamGrads<T> g;
  for (const auto& w : net.weights) g.weights.push_back(Matrix<T>::Zero(w.rows(), w.cols()));
  for (const auto& b : net.biases) g.biases.push_back(RowVector<T>::Zero(b.size()));
  return g;
}

template <typename T>
Vector<double> ParamGrads<T>::flatten() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  Vector<double> out(static_cast<Eigen::Index>(n));
  Eigen::Index k = 0;
  for (const auto& w : weights) {
    for (Eigen::Index i = 0; i < w.size(); ++i) out[k++] = static_cast<double>(w.data()[i]);
  }
  for (const auto& b : biases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) out[k++] = static_cast<double>(b[i]);
  }
  return out;
}

template <typename T>
LayeredEnergyNet<T> init_net(std::span<const int> layer_sizes, double alpha_w, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw ConfigError("energy net needs at least two layers");
  for (int s : layer_sizes) {
    if (s <= 0) throw ConfigError("layer size must be positive, got " + std::to_string(s));
  }
  if (!(alpha_w >= 0.0) || !std::isfinite(alpha_w)) throw ConfigError("alpha_w must be finite and non-negative");

  LayeredEnergyNet<T> net;
  net.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  net.seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_left = layer_sizes[l];
    const double bound = alpha_w / std::sqrt(static_cast<double>(fan_left));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix<T> w(layer_sizes[l], layer_sizes[l + 1]);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w.data()[i] = bound > 0.0 ? static_cast<T>(dist(rng)) : T(0);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(RowVector<T>::Zero(layer_sizes[l + 1]));
  }
  return net;
}

template <typename T>
Vector<double> flatten_parameters(const LayeredEnergyNet<T>& net) {
  ParamGrads<T> view{net.weights, net.biases};
  return view.flatten();
}

template <typename T>
void assign_parameters(LayeredEnergyNet<T>& net, const Vector<double>& flat) {
  if (static_cast<std::size_t>(flat.size()) != net.num_parameters()) {
    throw ContractError("parameter vector length does not match the network");
  }
  Eigen::Index k = 0;
  for (auto& w : net.weights) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<T>(flat[k++]);
  }
  for (auto& b : net.biases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = static_cast<T>(flat[k++]);
  }
}

template <typename T>
std::uint64_t parameter_hash(const LayeredEnergyNet<T>& net) {
  std::uint64_t h = io::fnv1a(net.layer_sizes.data(), net.layer_sizes.size() * sizeof(int));
  for (const auto& w : net.weights) h = io::fnv1a(w.data(), static_cast<std::size_t>(w.size()) * sizeof(T), h);
  for (const auto& b : net.biases) h = io::fnv1a(b.data(), static_cast<std::size_t>(b.size()) * sizeof(T), h);
  return h;
}

template <typename T>
Matrix<T> activate(const LayeredEnergyNet<T>& net, int layer, const Matrix<T>& states) {
  if (!net.is_hidden(layer)) return states;
  return states.unaryExpr([](T x) { return hard_sigmoid(x); });
}

#define EQPPO_INSTANTIATE(T)                                                                         \
  template struct LayeredEnergyNet<T>;                                                               \
  template struct ParamGrads<T>;                                                                     \
  template LayeredEnergyNet<T> init_net<T>(std::span<const int>, double, std::uint64_t);            \
  template Vector<double> flatten_parameters<T>(const LayeredEnergyNet<T>&);                         \
  template void assign_parameters<T>(LayeredEnergyNet<T>&, const Vector<double>&);                   \
  template std::uint64_t parameter_hash<T>(const LayeredEnergyNet<T>&);                              \
  template Matrix<T> activate<T>(const LayeredEnergyNet<T>&, int, const Matrix<T>&);

EQPPO_INSTANTIATE(float)
EQPPO_INSTANTIATE(double)
#undef EQPPO_INSTANTIATE

}  // namespace eqppo::eqprop
