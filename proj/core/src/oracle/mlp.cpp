#include "eqppo/oracle/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "eqppo/common/errors.hpp"

namespace eqppo::oracle {

std::size_t MlpNet::num_parameters() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

MlpGrads MlpGrads::zeros_like(const MlpNet& net) {
  MlpGrads g;
  for (const auto& w : net.weights) g.weights.push_back(MatrixD::Zero(w.rows(), w.cols()));
  for (const auto& b : net.biases) g.biases.push_back(RowVectorD::Zero(b.size()));
  return g;
}

VectorD MlpGrads::flatten() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  VectorD out(static_cast<Eigen::Index>(n));
  Eigen::Index k = 0;
  for (const auto& w : weights) {
    out.segment(k, w.size()) = Eigen::Map<const VectorD>(w.data(), w.size());
    k += w.size();
  }
  for (const auto& b : biases) {
    out.segment(k, b.size()) = b.transpose();
    k += b.size();
  }
  return out;
}

MlpNet init_mlp(std::span<const int> layer_sizes, std::uint64_t seed, double scale, MlpActivation hidden) {
  if (layer_sizes.size() < 2) throw ConfigError("mlp needs at least two layers");
  for (int s : layer_sizes) {
    if (s <= 0) throw ConfigError("layer size must be positive, got " + std::to_string(s));
  }
  MlpNet net;
  net.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  net.hidden_activation = hidden;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const double bound = scale / std::sqrt(static_cast<double>(layer_sizes[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    MatrixD w(layer_sizes[l], layer_sizes[l + 1]);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
    net.weights.push_back(std::move(w));
    net.biases.push_back(RowVectorD::Zero(layer_sizes[l + 1]));
  }
  return net;
}

namespace {

void check_input(const MlpNet& net, const MatrixD& input) {
  if (input.cols() != net.input_size()) {
    throw ContractError("mlp input width " + std::to_string(input.cols()) + " != " + std::to_string(net.input_size()));
  }
}

MatrixD hidden_act(const MlpNet& net, const MatrixD& z) {
  if (net.hidden_activation == MlpActivation::kIdentity) return z;
  return z.array().tanh().matrix();
}

}  // namespace

MatrixD mlp_forward(const MlpNet& net, const MatrixD& input) {
  check_input(net, input);
  MatrixD h = input;
  const std::size_t n = net.weights.size();
  for (std::size_t l = 0; l < n; ++l) {
    MatrixD z = h * net.weights[l];
    z.rowwise() += net.biases[l];
    h = (l + 1 < n) ? hidden_act(net, z) : z;
  }
  return h;
}

MlpForwardBackward mlp_forward_backward(const MlpNet& net, const MatrixD& input, const MatrixD& out_grad) {
  check_input(net, input);
  const std::size_t n = net.weights.size();
  std::vector<MatrixD> acts;  // acts[l] is the input to weights[l]
  acts.reserve(n + 1);
  acts.push_back(input);
  for (std::size_t l = 0; l < n; ++l) {
    MatrixD z = acts.back() * net.weights[l];
    z.rowwise() += net.biases[l];
    acts.push_back((l + 1 < n) ? hidden_act(net, z) : z);
  }
  if (out_grad.rows() != input.rows() || out_grad.cols() != net.output_size()) {
    throw ContractError("out_grad shape does not match the mlp output");
  }

  MlpForwardBackward res;
  res.output = acts.back();
  res.grads = MlpGrads::zeros_like(net);
  MatrixD delta = out_grad;  // dL/dz of the current layer
  for (std::size_t l = n; l-- > 0;) {
    res.grads.weights[l] = acts[l].transpose() * delta;
    res.grads.biases[l] = delta.colwise().sum();
    if (l == 0) break;
    MatrixD dh = delta * net.weights[l].transpose();
    if (net.hidden_activation == MlpActivation::kTanh) {
      delta = dh.cwiseProduct((1.0 - acts[l].array().square()).matrix());
    } else {
      delta = dh;
    }
  }
  return res;
}

VectorD flatten_parameters(const MlpNet& net) {
  MlpGrads view{net.weights, net.biases};
  return view.flatten();
}

void assign_parameters(MlpNet& net, const VectorD& flat) {
  if (static_cast<std::size_t>(flat.size()) != net.num_parameters()) {
    throw ContractError("parameter vector length does not match the mlp");
  }
  Eigen::Index k = 0;
  for (auto& w : net.weights) {
    Eigen::Map<VectorD>(w.data(), w.size()) = flat.segment(k, w.size());
    k += w.size();
  }
  for (auto& b : net.biases) {
    b = flat.segment(k, b.size()).transpose();
    k += b.size();
  }
}

}  // namespace eqppo::oracle
