#pragma once

#include "auvnav/types.hpp"

namespace auvnav {

// Fixed parameters of the mechanization. Gravity is evaluated once at the
// initial latitude and held constant; Earth rotation and transport rate are
// neglected (their effect at AUV speeds over a few hundred seconds is far
// below the injected sensor noise).
struct StrapdownParams {
  double gravity = 9.7963;  // m/s^2

  static StrapdownParams at_latitude(double lat_rad);
};

/// Advances the navigation state by one IMU interval.
///
/// Attitude uses the constant-rate quaternion update (renormalized), velocity
/// integrates the specific force rotated at the interval-midpoint attitude
/// plus gravity, and position integrates the trapezoid of the velocity.
/// Throws std::invalid_argument on non-finite input, non-positive dt, or a
/// latitude at/beyond the poles.
NavState mechanize(const NavState& state, const ImuSample& imu, double dt,
                   const StrapdownParams& params);

}  // namespace auvnav
