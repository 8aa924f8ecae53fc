#pragma once

#include <Eigen/Dense>

#include "auvnav/types.hpp"

namespace auvnav {

using Matrix12d = Eigen::Matrix<double, 12, 12>;

// Diagonal continuous process noise: accelerometer and gyro variances per
// axis plus the shared bias random-walk variance.
struct ProcessNoiseSpec {
  Eigen::Vector3d q_f = Eigen::Vector3d::Constant(0.01);   // (m/s^2)^2
  Eigen::Vector3d q_w = Eigen::Vector3d::Constant(0.001);  // (rad/s)^2
  double eps_bias = 0.001;

  static ProcessNoiseSpec isotropic(double qf, double qw,
                                    double eps = 0.001) {
    ProcessNoiseSpec s;
    s.q_f.setConstant(qf);
    s.q_w.setConstant(qw);
    s.eps_bias = eps;
    return s;
  }

  bool positive() const {
    return (q_f.array() > 0.0).all() && (q_w.array() > 0.0).all() &&
           eps_bias > 0.0;
  }
};

// 12-state error filter context. Error ordering is
// [dv(3), datt(3), accel bias(3), gyro bias(3)]; the error estimate itself is
// reset to zero after every injection, so only P and the biases persist.
struct ErrorFilterState {
  Matrix12d P = Matrix12d::Zero();
  Eigen::Vector3d b_a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b_g = Eigen::Vector3d::Zero();
  Eigen::Vector3d last_innovation = Eigen::Vector3d::Zero();
  long psd_clamp_count = 0;
};

struct DvlMeasurement {
  Eigen::Vector3d v_meas = Eigen::Vector3d::Zero();  // m/s, NED
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity() * 0.01;  // (m/s)^2
};

struct DvlUpdateResult {
  ErrorFilterState fs;
  NavState nav;
  Eigen::Vector3d innovation;
  Eigen::Matrix3d innovation_cov;  // H P- H^T + R
};

// Initial covariance: (0.1 m/s)^2 velocity, (0.01 rad)^2 attitude,
// (0.01)^2 biases.
Matrix12d initial_covariance();

/// Covariance prediction over one IMU interval: P <- Phi P Phi^T + Qd with
/// Phi = I + F dt. F couples velocity error to attitude error through the
/// rotated specific force and to the accelerometer bias; attitude error is
/// driven by the gyro bias; biases are random walks. P is symmetrized every
/// step; if positive semidefiniteness is lost beyond tolerance the matrix is
/// eigenvalue-clamped and psd_clamp_count is bumped.
ErrorFilterState propagate(const ErrorFilterState& fs, const NavState& state,
                           const ImuSample& imu, const ProcessNoiseSpec& q,
                           double dt);

/// DVL velocity update (H = [I3 0]) with Joseph-form covariance update and
/// closed-loop injection of the error estimate into the navigation state.
DvlUpdateResult dvl_update(const ErrorFilterState& fs, const NavState& state,
                           const DvlMeasurement& z);

}  // namespace auvnav
