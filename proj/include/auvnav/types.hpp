#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>

namespace auvnav {

// One IMU epoch: specific force (m/s^2) and angular rate (rad/s), both in the
// body frame. A sample timestamped t represents the sensor output held over
// [t, t + dt); synthesized samples are evaluated at the interval midpoint.
struct ImuSample {
  Eigen::Vector3d f_b = Eigen::Vector3d::Zero();
  Eigen::Vector3d w_ib = Eigen::Vector3d::Zero();
  double t = 0.0;

  bool finite() const {
    return f_b.allFinite() && w_ib.allFinite() && std::isfinite(t);
  }
};

// Navigation solution: geodetic position, NED velocity, body-to-NED attitude.
// Depth is positive down.
struct NavState {
  double lat = 0.0;  // rad
  double lon = 0.0;  // rad
  double depth = 0.0;  // m, positive down
  Eigen::Vector3d v_n = Eigen::Vector3d::Zero();  // m/s, NED
  Eigen::Quaterniond q_bn = Eigen::Quaterniond::Identity();

  bool finite() const {
    return std::isfinite(lat) && std::isfinite(lon) && std::isfinite(depth) &&
           v_n.allFinite() && q_bn.coeffs().allFinite();
  }
};

}  // namespace auvnav
