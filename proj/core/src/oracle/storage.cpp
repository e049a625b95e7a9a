#include "eqppo/oracle/storage.hpp"

#include <ostream>

namespace eqppo::oracle {

std::string to_string(StorageMethod m) { return m == StorageMethod::kEP ? "EP" : "BPTT"; }

void StorageLedger::write_csv_header(std::ostream& out) { out << "method,steps,stored_scalars\n"; }

void StorageLedger::write_csv_row(std::ostream& out) const {
  out << to_string(method_) << ',' << steps_ << ',' << peak_ << '\n';
}

template <typename T>
StorageLedger ep_storage(const eqprop::LayeredEnergyNet<T>& net, int batch, int steps_free) {
  StorageLedger ledger(StorageMethod::kEP, steps_free);
  const auto per_phase = static_cast<std::uint64_t>(net.num_free_neurons()) * static_cast<std::uint64_t>(batch);
  ledger.retain(per_phase);  // +beta equilibrium
  ledger.retain(per_phase);  // -beta equilibrium
  return ledger;
}

template StorageLedger ep_storage<float>(const eqprop::LayeredEnergyNet<float>&, int, int);
template StorageLedger ep_storage<double>(const eqprop::LayeredEnergyNet<double>&, int, int);

}  // namespace eqppo::oracle
