#pragma once

#include <cmath>

namespace auvnav {

// Spherical Earth radius used for position integration (m). Position is
// carried for trajectory output only and never enters the error state, so the
// ellipsoidal corrections are not worth their complexity at AUV speeds.
inline constexpr double kEarthRadius = 6378137.0;

// Somigliana normal gravity at sea level (m/s^2).
inline double normal_gravity(double lat_rad) {
  const double s2 = std::sin(lat_rad) * std::sin(lat_rad);
  return 9.7803253359 * (1.0 + 1.93185265241e-3 * s2) /
         std::sqrt(1.0 - 6.69437999013e-3 * s2);
}

inline double deg2rad(double deg) { return deg * M_PI / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / M_PI; }

// Wraps an angle to (-pi, pi].
inline double wrap_pi(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a <= -M_PI) a += 2.0 * M_PI;
  if (a > M_PI) a -= 2.0 * M_PI;
  return a;
}

}  // namespace auvnav
