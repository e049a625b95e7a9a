#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace eqppo::harness {

struct GradCheckConfig {
  int nets = 20;
  std::uint64_t seed = 1;
  std::vector<int> max_sizes{8, 16, 16, 4};
  int batch = 4;
  double beta = 0.1;
  int steps = 100;          // relaxation steps for every phase and for the unrolled loss
  int storage_steps = 30;   // T_free for the storage count
  double fd_step = 1e-4;
  double alpha_w = 0.5;
};

struct GradCheckCase {
  std::vector<int> sizes;
  double cos_fd = 0.0;    // EP vs finite differences of the relaxed loss
  double rel_fd = 0.0;
  double cos_bptt = 0.0;  // EP vs reverse mode through the unrolled relaxation
  std::uint64_t bptt_scalars = 0;
  std::uint64_t ep_scalars = 0;
};

/// Three-phase gradients of a quadratic output loss on random nets, checked
/// against finite differences and BPTT.
std::vector<GradCheckCase> grad_check(const GradCheckConfig& cfg);

void write_grad_check_csv(std::ostream& out, const std::vector<GradCheckCase>& cases);

}  // namespace eqppo::harness
