#include "eqppo/cpg/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqppo/common/errors.hpp"
#include "eqppo/cpg/oscillator.hpp"

namespace eqppo::cpg {

void LegGeometry::validate() const {
  if (!(hip_offset > 0 && thigh > 0 && calf > 0)) throw ConfigError("leg link lengths must be positive");
  if (side != 1 && side != -1) throw ConfigError("leg side must be +1 or -1");
}

LegGeometry leg_geometry(int limb, double hip_offset, double thigh, double calf) {
  LegGeometry g;
  g.hip_offset = hip_offset;
  g.thigh = thigh;
  g.calf = calf;
  g.side = (limb == kFL || limb == kRL) ? 1 : -1;
  return g;
}

Vec3 leg_fk(const JointAngles& q, const LegGeometry& g) {
  const double l1 = g.thigh, l2 = g.calf, off = g.signed_offset();
  double x = -l1 * std::sin(q[1]) - l2 * std::sin(q[1] + q[2]);
  double zs = -l1 * std::cos(q[1]) - l2 * std::cos(q[1] + q[2]);
  double c = std::cos(q[0]), s = std::sin(q[0]);
  return {x, off * c - zs * s, off * s + zs * c};
}

namespace {

double hip_angle(double y, double z, double zs, const LegGeometry& g) {
  return wrap_angle(std::atan2(z, y) - std::atan2(zs, g.signed_offset()));
}

// Sagittal-plane solution for the leg rotated by q0.
JointAngles solve(double x, double zs, double q0, const LegGeometry& g) {
  const double l1 = g.thigh, l2 = g.calf;
  double c2 = (x * x + zs * zs - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  double q2 = -std::acos(std::clamp(c2, -1.0, 1.0));
  double q1 = std::atan2(-x, -zs) - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  return {q0, q1, q2};
}

[[noreturn]] void unreachable(double distance) {
  std::ostringstream os;
  os << "foot target outside leg workspace by " << distance << " m";
  throw WorkspaceError(os.str(), distance);
}

}  // namespace

JointAngles leg_ik(const Vec3& p, const LegGeometry& g) {
  const double l1 = g.thigh, l2 = g.calf;
  double yz2 = p[1] * p[1] + p[2] * p[2];
  double off2 = g.hip_offset * g.hip_offset;
  if (yz2 < off2) unreachable(g.hip_offset - std::sqrt(yz2));
  double zs = -std::sqrt(yz2 - off2);
  double planar = std::hypot(p[0], zs);
  double max_reach = l1 + l2, min_reach = std::abs(l1 - l2);
  // Tolerate rounding right on the boundary (e.g. the fully extended pose).
  constexpr double kSlack = 1e-12;
  if (planar > max_reach + kSlack) unreachable(planar - max_reach);
  if (planar < min_reach - kSlack) unreachable(min_reach - planar);
  return solve(p[0], zs, hip_angle(p[1], p[2], zs, g), g);
}

JointAngles leg_ik_clamped(const Vec3& p, const LegGeometry& g, double fraction, bool* clamped) {
  const double l1 = g.thigh, l2 = g.calf;
  if (clamped) *clamped = false;
  double y = p[1], z = p[2];
  double yz = std::hypot(y, z);
  double off = g.hip_offset;
  // Targets inside the hip-offset cylinder are pushed out along their (y, z) direction.
  double min_yz = off / fraction;
  if (yz < min_yz) {
    if (clamped) *clamped = true;
    if (yz < 1e-12) {
      y = 0.0;
      z = -min_yz;
    } else {
      y *= min_yz / yz;
      z *= min_yz / yz;
    }
    yz = min_yz;
  }
  double zs = -std::sqrt(yz * yz - off * off);
  double q0 = hip_angle(y, z, zs, g);
  double x = p[0];
  double planar = std::hypot(x, zs);
  double max_reach = fraction * (l1 + l2);
  double min_reach = std::abs(l1 - l2) / fraction;
  double target = std::clamp(planar, min_reach, max_reach);
  if (target != planar) {
    if (clamped) *clamped = true;
    if (planar < 1e-12) {
      zs = -target;
    } else {
      x *= target / planar;
      zs *= target / planar;
    }
  }
  return solve(x, zs, q0, g);
}

Vec3 hip_frame_target(const Vec3& f, const LegGeometry& g) { return {f[0], f[1] + g.signed_offset(), f[2]}; }

}  // namespace eqppo::cpg
