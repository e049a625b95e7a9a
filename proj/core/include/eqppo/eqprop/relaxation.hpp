#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eqppo/eqprop/energy_net.hpp"

namespace eqppo::eqprop {

/// dL/dxi_out for the current output states; the step index lets stateful
/// objectives instrument the trajectory.
template <typename T>
using LossGradient = std::function<Matrix<T>(const Matrix<T>& xi_out, int step)>;

/// Output-layer nudge: force = beta * dL/dxi_out, recomputed every step.
template <typename T>
struct NudgeForce {
  double beta = 0.0;
  LossGradient<T> loss_gradient;

  static NudgeForce none() { return {}; }

  /// Zero whenever beta == 0 or no loss is attached.
  Matrix<T> operator()(const Matrix<T>& xi_out, int step) const;
  bool active() const { return beta != 0.0 && static_cast<bool>(loss_gradient); }
};

struct RelaxConfig {
  int max_steps = 30;
  double eps_ep = 1.0;
  double conv_tol = 1e-4;
  int conv_window = 5;
  /// Freeze a sample once it has converged. Off by default: the step counts
  /// are fixed and convergence is only recorded.
  bool early_exit = false;
};

inline constexpr int kConvergenceWindow = 5;

template <typename T>
struct RelaxationState {
  /// Per-layer states, one row per sample. states[0] is the clamped input.
  std::vector<Matrix<T>> states;
  /// Dynamics steps applied to each sample.
  std::vector<int> step_count;
  /// First step at which max|dxi| stayed below conv_tol for the whole
  /// window, or -1 if that never happened.
  std::vector<int> steps_to_convergence;
  /// Ring of the last kConvergenceWindow per-sample max |dxi| values.
  Matrix<T> max_change_history;
  int history_head = 0;
  std::vector<int> below_tol_run;
  std::vector<std::uint8_t> converged;

  int batch() const { return static_cast<int>(states.front().rows()); }
  const Matrix<T>& output() const { return states.back(); }
  Matrix<T>& output() { return states.back(); }
};

/// Zero states for every non-input layer, input clamped to `input`.
template <typename T>
RelaxationState<T> initial_state(const LayeredEnergyNet<T>& net, const Matrix<T>& input);

/// Iterates xi <- xi + eps_ep * dxi/dt. Hidden states are projected onto
/// [0, 1], where the hard-sigmoid energy attains its per-neuron minimum, so the
/// fixed points are those of the unprojected dynamics. Starts from `start`
/// when given (its bookkeeping is reset), otherwise from zeros.
template <typename T>
RelaxationState<T> relax(const LayeredEnergyNet<T>& net, const Matrix<T>& input,
                         const NudgeForce<T>& nudge, const RelaxConfig& cfg,
                         const RelaxationState<T>* start = nullptr);

/// One synchronous dynamics step without projection bookkeeping; returns the
/// new states. Exposed for fixed-point checks.
template <typename T>
std::vector<Matrix<T>> dynamics_step(const LayeredEnergyNet<T>& net, const std::vector<Matrix<T>>& states,
                                     const NudgeForce<T>& nudge, double eps_ep, int step = 0);

/// Free-phase outputs (action means, values) for a batch.
template <typename T>
Matrix<T> infer(const LayeredEnergyNet<T>& net, const Matrix<T>& input, const RelaxConfig& cfg);

}  // namespace eqppo::eqprop
