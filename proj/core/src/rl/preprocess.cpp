#include "eqppo/rl/preprocess.hpp"

#include <cmath>
#include <numbers>

#include "eqppo/common/errors.hpp"

namespace eqppo::rl {

IdctExpander::IdctExpander(int in_dim, int out_dim) {
  if (in_dim <= 0 || out_dim <= 0) throw ConfigError("iDCT dimensions must be positive");
  if (in_dim > out_dim) {
    throw ConfigError("iDCT input dimension " + std::to_string(in_dim) + " exceeds output dimension " +
                      std::to_string(out_dim));
  }
  basis_.resize(in_dim, out_dim);
  const double n = static_cast<double>(out_dim);
  for (int k = 0; k < in_dim; ++k) {
    const double alpha = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int j = 0; j < out_dim; ++j) {
      basis_(k, j) = alpha * std::cos(std::numbers::pi * (2.0 * j + 1.0) * k / (2.0 * n));
    }
  }
}

MatrixD IdctExpander::expand(const MatrixD& obs) const {
  if (obs.cols() != basis_.rows()) throw ContractError("iDCT input width mismatch");
  return obs * basis_;
}

VectorD idct_expand(const VectorD& obs, int out_dim) {
  IdctExpander e(static_cast<int>(obs.size()), out_dim);
  return e.expand(obs.transpose()).transpose();
}

RunningNormalizer::RunningNormalizer(int dim) : mean_(RowVectorD::Zero(dim)), var_(RowVectorD::Ones(dim)) {}

void RunningNormalizer::update(const MatrixD& batch) {
  if (batch.rows() == 0) return;
  if (batch.cols() != mean_.size()) throw ContractError("normalizer width mismatch");
  const double nb = static_cast<double>(batch.rows());
  const RowVectorD bmean = batch.colwise().mean();
  const RowVectorD bvar = (batch.rowwise() - bmean).array().square().colwise().sum().matrix() / nb;
  if (count_ == 0.0) {
    mean_ = bmean;
    var_ = bvar;
    count_ = nb;
    return;
  }
  const double total = count_ + nb;
  const RowVectorD delta = bmean - mean_;
  const RowVectorD m2 = var_ * count_ + bvar * nb + (delta.array().square() * (count_ * nb / total)).matrix();
  mean_ += delta * (nb / total);
  var_ = m2 / total;
  count_ = total;
}

RowVectorD RunningNormalizer::stddev() const { return var_.array().sqrt().matrix(); }

MatrixD RunningNormalizer::normalize(const MatrixD& batch) const {
  if (batch.cols() != mean_.size()) throw ContractError("normalizer width mismatch");
  const RowVectorD inv = (stddev().array() + 1e-8).inverse().matrix();
  return (batch.rowwise() - mean_).array().rowwise() * inv.array();
}

void RunningNormalizer::set_state(double count, RowVectorD mean, RowVectorD var) {
  if (mean.size() != var.size()) throw ContractError("normalizer state size mismatch");
  count_ = count;
  mean_ = std::move(mean);
  var_ = std::move(var);
}

MatrixD running_normalize(const MatrixD& obs, RunningNormalizer& state) {
  state.update(obs);
  return state.normalize(obs);
}

std::vector<double> normalize_advantages(const std::vector<double>& adv) {
  if (adv.empty()) return {};
  Eigen::Map<const VectorD> a(adv.data(), static_cast<Eigen::Index>(adv.size()));
  const double mean = a.mean();
  const double sd = std::sqrt((a.array() - mean).square().mean());
  std::vector<double> out(adv.size());
  for (std::size_t i = 0; i < adv.size(); ++i) out[i] = (adv[i] - mean) / (sd + 1e-8);
  return out;
}

}  // namespace eqppo::rl
