#pragma once

#include <functional>
#include <string>
#include <vector>

#include "auvnav/types.hpp"

namespace auvnav {

// A smooth, constant-speed, constant-depth trajectory defined by a heading
// profile. Velocity, acceleration, attitude (yaw only) and body rate all
// follow in closed form, which is what makes exact IMU synthesis possible.
class AnalyticTrajectory {
 public:
  std::string id;
  double duration = 400.0;  // s
  double speed = 1.0;       // m/s
  double lat0 = 0.0;        // rad
  double lon0 = 0.0;        // rad
  double depth0 = 5.0;      // m, positive down
  std::function<double(double)> heading;       // rad
  std::function<double(double)> heading_rate;  // rad/s

  Eigen::Vector3d velocity_ned(double t) const;
  Eigen::Vector3d accel_ned(double t) const;
  Eigen::Vector3d body_rate(double t) const;
  Eigen::Quaterniond attitude(double t) const;
  NavState initial_state() const;
};

// The four dataset baselines plus the held-out evaluation profile. All start
// at (32 deg, 34 deg, 5 m depth); the evaluation profile starts heading north
// at 1 m/s.
AnalyticTrajectory make_straight_line(double duration = 400.0);
AnalyticTrajectory make_sinusoidal_heading(double duration = 400.0);
AnalyticTrajectory make_lawnmower(double duration = 400.0);
AnalyticTrajectory make_spiral_turn(double duration = 400.0);
AnalyticTrajectory make_eval_lawnmower(double duration = 330.0);

std::vector<AnalyticTrajectory> baseline_trajectories(double duration = 400.0);

// Lookup by id ("straight-line", "sinusoidal-heading", "lawnmower",
// "spiral-turn", "eval-lawnmower"). Throws on unknown id.
AnalyticTrajectory trajectory_by_id(const std::string& id, double duration);

// Ideal inertial readings plus ground truth for one trajectory.
// imu[i] covers [i*dt, (i+1)*dt) and truth[i] is the analytic state at the
// end of that interval; feeding imu back through mechanize from `initial`
// reproduces truth velocity within the round-trip tolerance.
struct SyntheticTruth {
  NavState initial;
  std::vector<ImuSample> imu;
  std::vector<NavState> truth;
};

SyntheticTruth inverse_mechanize(const AnalyticTrajectory& traj, double rate_hz);

}  // namespace auvnav
