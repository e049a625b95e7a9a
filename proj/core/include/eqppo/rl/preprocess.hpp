#pragma once

#include <vector>

#include "eqppo/common/linalg.hpp"

namespace eqppo::rl {

/// Treats an observation as the first D orthonormal DCT-II coefficients of a
/// length-`out_dim` signal and returns that signal.
class IdctExpander {
 public:
  IdctExpander(int in_dim, int out_dim);

  int in_dim() const { return static_cast<int>(basis_.rows()); }
  int out_dim() const { return static_cast<int>(basis_.cols()); }
  /// Rows are samples.
  MatrixD expand(const MatrixD& obs) const;
  const MatrixD& basis() const { return basis_; }

 private:
  MatrixD basis_;  // in_dim x out_dim, row k = alpha_k cos(pi (2n + 1) k / (2 out_dim))
};

VectorD idct_expand(const VectorD& obs, int out_dim);

/// Streaming per-feature mean and population variance (Chan et al. merge).
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(int dim);

  void update(const MatrixD& batch);
  /// (x - mean) / (std + 1e-8). Before any update the statistics are mean 0, std 1.
  MatrixD normalize(const MatrixD& batch) const;

  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const RowVectorD& mean() const { return mean_; }
  const RowVectorD& var() const { return var_; }
  RowVectorD stddev() const;
  void set_state(double count, RowVectorD mean, RowVectorD var);

 private:
  double count_ = 0.0;
  RowVectorD mean_;
  RowVectorD var_;
};

/// Updates the statistics with `obs`, then normalizes it.
MatrixD running_normalize(const MatrixD& obs, RunningNormalizer& state);

/// (A - mean) / (std + 1e-8) with the population standard deviation.
std::vector<double> normalize_advantages(const std::vector<double>& adv);

}  // namespace eqppo::rl
