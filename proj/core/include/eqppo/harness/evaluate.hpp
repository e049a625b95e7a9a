#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "eqppo/envsim/walking_test.hpp"

namespace eqppo::harness {

/// One trained controller: a CPG policy and an optional RES policy.
struct ControllerVersion {
  envsim::PolicyFn cpg;
  envsim::PolicyFn res;
};

/// Loads a stage-1 bundle (CPG only) or a stage-2 bundle together with the
/// CPG checkpoint recorded in its config.
ControllerVersion load_controller(const std::filesystem::path& bundle);

struct EvalConfig {
  std::vector<double> speeds = envsim::walking_test_speeds();
  std::vector<double> heights = envsim::walking_test_heights();
  int episodes = 100;
  envsim::WalkingTestConfig walking{};
};

/// Mean and standard deviation across versions of one grid cell.
struct EvalCell {
  double v_target = 0.0;
  double h_max = 0.0;
  double required_distance = 0.0;
  int versions = 0;
  int episodes = 0;  // per version
  double success_mean = 0.0, success_std = 0.0;
  double speed_mean = 0.0, speed_std = 0.0;
  double power_mean = 0.0, power_std = 0.0;
  double roll_mean = 0.0, roll_std = 0.0;
  double pitch_mean = 0.0, pitch_std = 0.0;
  double roll_rate_mean = 0.0, roll_rate_std = 0.0;
  double pitch_rate_mean = 0.0, pitch_rate_std = 0.0;
};

/// Walking test over the speed x height grid. Zero episodes give an empty report.
std::vector<EvalCell> evaluate(const std::vector<ControllerVersion>& versions, const EvalConfig& cfg);

void write_eval_csv(std::ostream& out, const std::vector<EvalCell>& cells);

}  // namespace eqppo::harness
