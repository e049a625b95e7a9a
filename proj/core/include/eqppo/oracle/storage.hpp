#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "eqppo/eqprop/energy_net.hpp"

namespace eqppo::oracle {

enum class StorageMethod { kEP, kBPTT };

std::string to_string(StorageMethod m);

/// Count of activation scalars retained for the gradient computation.
class StorageLedger {
 public:
  StorageLedger(StorageMethod method, int steps) : method_(method), steps_(steps) {}

  void retain(std::uint64_t scalars) {
    current_ += scalars;
    if (current_ > peak_) peak_ = current_;
  }
  void release(std::uint64_t scalars) { current_ = scalars > current_ ? 0 : current_ - scalars; }

  StorageMethod method() const { return method_; }
  int steps() const { return steps_; }
  std::uint64_t peak_stored_scalars() const { return peak_; }

  /// "method,steps,stored_scalars"
  void write_csv_row(std::ostream& out) const;
  static void write_csv_header(std::ostream& out);

 private:
  StorageMethod method_;
  int steps_;
  std::uint64_t current_ = 0;
  std::uint64_t peak_ = 0;
};

/// Storage of a three-phase EP update: only the two nudge equilibria of the
/// non-input layers are kept for the contrastive estimate, whatever the step count.
template <typename T>
StorageLedger ep_storage(const eqprop::LayeredEnergyNet<T>& net, int batch, int steps_free);

}  // namespace eqppo::oracle
