#pragma once

#include <array>

namespace eqppo::cpg {

using Vec3 = std::array<double, 3>;

struct TrajectoryParams {
  double d_step = 0.15;  // stride length
  double h = 0.25;       // body height
  double g_c = 0.1;      // swing clearance
  double g_p = 0.02;     // stance penetration

  void validate() const;
};

/// Foot position relative to its nominal point below the hip:
///   x = -d (r - 1) cos(theta) cos(phi)
///   y = -d (r - 1) cos(theta) sin(phi)
///   z = -h + (g_c if sin(theta) > 0 else g_p) sin(theta)
Vec3 foot_target(double r, double theta, double phi, const TrajectoryParams& params);

}  // namespace eqppo::cpg
