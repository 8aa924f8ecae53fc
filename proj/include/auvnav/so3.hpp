#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace auvnav {

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

// Unit quaternion for a rotation vector (axis * angle). Closed form with a
// Taylor fallback near zero angle.
inline Eigen::Quaterniond quat_from_rotvec(const Eigen::Vector3d& r) {
  const double angle = r.norm();
  if (angle < 1e-12) {
    // sin(a/2)/a ~ 1/2 - a^2/48
    const double s = 0.5 - angle * angle / 48.0;
    Eigen::Quaterniond q(1.0 - angle * angle / 8.0, s * r.x(), s * r.y(),
                         s * r.z());
    return q.normalized();
  }
  const double half = 0.5 * angle;
  const double s = std::sin(half) / angle;
  return Eigen::Quaterniond(std::cos(half), s * r.x(), s * r.y(), s * r.z());
}

}  // namespace auvnav
