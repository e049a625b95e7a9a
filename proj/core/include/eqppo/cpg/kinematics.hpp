#pragma once

#include <array>

#include "eqppo/cpg/trajectory.hpp"

namespace eqppo::cpg {

using JointAngles = std::array<double, 3>;  // hip (abduction), thigh, calf

/// Three-link leg. `side` is +1 for left legs and -1 for right legs; the hip
/// offset points along +y on the left.
struct LegGeometry {
  double hip_offset = 0.0838;
  double thigh = 0.2;
  double calf = 0.2;
  int side = 1;
  JointAngles lower_limit{-0.802851, -1.0472, -2.69653};
  JointAngles upper_limit{0.802851, 4.18879, -0.916298};

  double signed_offset() const { return side * hip_offset; }
  void validate() const;
};

LegGeometry leg_geometry(int limb, double hip_offset = 0.0838, double thigh = 0.2, double calf = 0.2);

/// Foot position in the hip frame (x forward, y left, z up).
Vec3 leg_fk(const JointAngles& q, const LegGeometry& geom);

/// Closed-form geometric inverse with the knee bent backward (calf angle <= 0).
/// Throws WorkspaceError for unreachable targets.
JointAngles leg_ik(const Vec3& foot, const LegGeometry& geom);

/// Like leg_ik, but an unreachable target is pulled radially (in the leg
/// plane) to `fraction` of the workspace boundary. Sets *clamped when it did.
JointAngles leg_ik_clamped(const Vec3& foot, const LegGeometry& geom, double fraction = 0.999,
                           bool* clamped = nullptr);

/// Nominal foot target in the hip frame: the trajectory point shifted by the hip offset.
Vec3 hip_frame_target(const Vec3& cpg_foot, const LegGeometry& geom);

}  // namespace eqppo::cpg
