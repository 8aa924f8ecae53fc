#include "auvnav/strapdown.hpp"

#include <stdexcept>

#include "auvnav/geo.hpp"
#include "auvnav/so3.hpp"

namespace auvnav {

StrapdownParams StrapdownParams::at_latitude(double lat_rad) {
  return StrapdownParams{normal_gravity(lat_rad)};
}

NavState mechanize(const NavState& state, const ImuSample& imu, double dt,
                   const StrapdownParams& params) {
  if (!imu.finite() || !state.finite()) {
    throw std::invalid_argument("mechanize: non-finite input");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("mechanize: dt must be positive");
  }
  if (std::abs(state.lat) >= M_PI / 2.0) {
    throw std::invalid_argument("mechanize: latitude at polar singularity");
  }

  const Eigen::Vector3d dtheta = imu.w_ib * dt;
  const Eigen::Quaterniond q_mid = state.q_bn * quat_from_rotvec(0.5 * dtheta);
  const Eigen::Vector3d g_n(0.0, 0.0, params.gravity);
  const Eigen::Vector3d a_n = q_mid * imu.f_b + g_n;

  NavState next = state;
  next.v_n = state.v_n + a_n * dt;
  next.q_bn = (state.q_bn * quat_from_rotvec(dtheta)).normalized();

  const Eigen::Vector3d v_avg = 0.5 * (state.v_n + next.v_n);
  next.lat = state.lat + v_avg.x() / kEarthRadius * dt;
  next.lon = wrap_pi(state.lon +
                     v_avg.y() / (kEarthRadius * std::cos(state.lat)) * dt);
  next.depth = state.depth + v_avg.z() * dt;
  return next;
}

}  // namespace auvnav
