#pragma once

#include <iosfwd>
#include <optional>

#include "eqppo/common/linalg.hpp"
#include "eqppo/rl/preprocess.hpp"

namespace eqppo::harness {

/// Raw running normalization, then optionally an iDCT expansion followed by
/// a second running normalizer on the expanded signal.
class Preprocessor {
 public:
  Preprocessor() = default;
  Preprocessor(int obs_dim, bool use_idct, int idct_dim);

  int obs_dim() const { return raw_.dim(); }
  int output_dim() const { return idct_ ? idct_->out_dim() : raw_.dim(); }
  bool uses_idct() const { return idct_.has_value(); }

  /// Applies the current statistics; does not update them.
  MatrixD transform(const MatrixD& raw) const;
  /// Folds a batch of raw observations into both normalizers.
  void update(const MatrixD& raw);

  const rl::RunningNormalizer& raw_normalizer() const { return raw_; }
  const rl::RunningNormalizer& expanded_normalizer() const { return expanded_; }

  void write(std::ostream& out) const;
  static Preprocessor read(std::istream& in);

 private:
  rl::RunningNormalizer raw_;
  std::optional<rl::IdctExpander> idct_;
  rl::RunningNormalizer expanded_;
};

}  // namespace eqppo::harness
