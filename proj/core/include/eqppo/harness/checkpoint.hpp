#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

#include "eqppo/envsim/walking_test.hpp"
#include "eqppo/harness/agent.hpp"
#include "eqppo/harness/config.hpp"
#include "eqppo/harness/preprocessor.hpp"
#include "eqppo/rl/optim.hpp"

namespace eqppo::harness {

/// Everything needed to resume training or run the policy. The layout of
/// the on-disk bundle is described in docs/checkpoint_format.md.
struct TrainingState {
  TrainerConfig config;
  std::unique_ptr<Agent> agent;
  RowVectorD log_sigma;
  rl::Adam logstd_opt;
  Preprocessor preprocessor;
  long long samples = 0;
  long long updates = 0;
  long long rollbacks = 0;
  std::uint64_t cpg_hash = 0;  // hash of the frozen CPG policy in stage 2, else 0
  std::string rng_state;

  TrainingState clone() const;
};

inline constexpr std::uint32_t kBundleFormatVersion = 1;

void write_bundle(std::ostream& out, const TrainingState& state);
TrainingState read_bundle(std::istream& in);
void save_bundle(const std::filesystem::path& path, const TrainingState& state);
TrainingState load_bundle(const std::filesystem::path& path);

/// Deterministic policy: preprocess a raw observation, return the mean action.
envsim::PolicyFn make_policy_fn(const TrainingState& state);

}  // namespace eqppo::harness
