#include "eqppo/cpg/trajectory.hpp"

#include <cmath>

#include "eqppo/common/errors.hpp"

namespace eqppo::cpg {

void TrajectoryParams::validate() const {
  if (!(d_step > 0 && h > 0 && g_c > 0 && g_p >= 0))
    throw ConfigError("trajectory parameters must be positive (g_p may be zero)");
}

Vec3 foot_target(double r, double theta, double phi, const TrajectoryParams& p) {
  double stride = -p.d_step * (r - 1.0) * std::cos(theta);
  double s = std::sin(theta);
  double lift = s > 0 ? p.g_c : p.g_p;
  return {stride * std::cos(phi), stride * std::sin(phi), -p.h + lift * s};
}

}  // namespace eqppo::cpg
