#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eqppo/eqprop/energy_net.hpp"
#include "eqppo/eqprop/three_phase.hpp"
#include "eqppo/harness/trainer.hpp"
#include "eqppo/rl/clip.hpp"

namespace eqppo::harness {

inline constexpr int kAdvantageBins = 16;
inline constexpr double kAdvantageRange = 4.0;

/// Bin of advantage in [-4, 4]; values outside land in the end bins.
int advantage_bin(double advantage);

struct Summary {
  int count = 0;
  double mean = 0.0;
  double std = 0.0;
};

struct NudgeBin {
  double lo = 0.0, hi = 0.0;
  Summary free;      // log10 r at the free equilibrium
  Summary extreme_pos;  // signed extreme log10 r over the positive nudge phase
  Summary extreme_neg;  // same for the negative nudge phase
};

struct NudgeReport {
  double eps_rev = 0.0;
  double beta = 0.0;
  std::vector<NudgeBin> bins;
  /// Minimum log10 r over both nudge phases among samples with A > 0.
  double min_log10_r_pos_adv = 0.0;
  /// Maximum log10 r over both nudge phases among samples with A < 0.
  double max_log10_r_neg_adv = 0.0;
  /// Largest |log10 r| change between consecutive nudge steps.
  double max_step_change = 0.0;
  /// Largest |log10 r - log10 r_free| over nudge steps for samples with A == 0.
  double max_drift_zero_adv = 0.0;
};

struct DiagnosticsConfig {
  std::vector<double> eps_rev{0.3, 0.7, 1.0};
  double beta = 0.1;
  eqprop::ThreePhaseConfig phases{};
  std::uint64_t seed = 1;
};

/// Runs both nudge phases on `sample_count` transitions drawn without
/// replacement from `data` and records log10 r_nudging at every step.
/// The network is read-only.
std::vector<NudgeReport> nudge_diagnostics(const eqprop::LayeredEnergyNet<float>& policy, const RolloutData& data,
                                           const RowVectorD& log_sigma, int sample_count,
                                           const rl::ClipConfig& base_clip, const DiagnosticsConfig& cfg);

/// One row per (eps_rev, bin).
void write_nudge_csv(std::ostream& out, const std::vector<NudgeReport>& reports);

}  // namespace eqppo::harness
