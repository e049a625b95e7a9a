#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "eqppo/harness/trainer.hpp"

namespace eqppo::harness {

enum class AblationAxis { kEpsRev, kSigmaScaling, kMaskMode, kIdct };

std::string to_string(AblationAxis a);
AblationAxis parse_ablation_axis(const std::string& s);

struct AblationArm {
  std::string label;
  TrainerConfig config;
  std::vector<std::vector<UpdateMetrics>> runs;  // one per seed
};

/// Copies of `base` differing only along `axis`:
///   eps_rev 0.3 / 0.7 / 1.0, sigma_scaling inv_sigma / inv_sigma_sq,
///   mask_mode dynamic / static, idct on / off.
std::vector<AblationArm> ablation_arms(const TrainerConfig& base, AblationAxis axis);

using AblationProgress = std::function<void(const AblationArm& arm, std::uint64_t seed, const UpdateMetrics& m)>;

/// Trains every arm for every seed; arms share seeds.
std::vector<AblationArm> run_ablation(const TrainerConfig& base, AblationAxis axis,
                                      const std::vector<std::uint64_t>& seeds,
                                      const AblationProgress& progress = {});

/// Long format: one row per (arm, seed, update).
void write_ablation_csv(std::ostream& out, const std::vector<AblationArm>& arms,
                        const std::vector<std::uint64_t>& seeds);

}  // namespace eqppo::harness
