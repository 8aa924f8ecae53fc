#include "auvnav/eskf.hpp"

#include <stdexcept>

#include "auvnav/so3.hpp"

namespace auvnav {

namespace {

// Symmetrize, then clamp negative eigenvalues if the matrix has drifted
// beyond tolerance. Returns true if a clamp was needed.
bool ensure_psd(Matrix12d& P) {
  P = 0.5 * (P + P.transpose()).eval();
  Eigen::LDLT<Matrix12d> ldlt(P);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) return false;
  Eigen::SelfAdjointEigenSolver<Matrix12d> eig(P);
  if (eig.eigenvalues().minCoeff() > -1e-9) return false;  // within tolerance
  const Eigen::Matrix<double, 12, 1> clamped =
      eig.eigenvalues().cwiseMax(0.0);
  P = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
  P = 0.5 * (P + P.transpose()).eval();
  return true;
}

}  // namespace

Matrix12d initial_covariance() {
  Matrix12d P = Matrix12d::Zero();
  P.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity() * 0.01;    // (0.1 m/s)^2
  P.block<3, 3>(3, 3) = Eigen::Matrix3d::Identity() * 1e-4;    // (0.01 rad)^2
  P.block<3, 3>(6, 6) = Eigen::Matrix3d::Identity() * 1e-4;
  P.block<3, 3>(9, 9) = Eigen::Matrix3d::Identity() * 1e-4;
  return P;
}

ErrorFilterState propagate(const ErrorFilterState& fs, const NavState& state,
                           const ImuSample& imu, const ProcessNoiseSpec& q,
                           double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("propagate: dt must be positive");
  }
  const Eigen::Matrix3d C = state.q_bn.toRotationMatrix();
  const Eigen::Vector3d f_n = C * (imu.f_b - fs.b_a);

  Matrix12d F = Matrix12d::Zero();
  F.block<3, 3>(0, 3) = skew(f_n);
  F.block<3, 3>(0, 6) = -C;
  F.block<3, 3>(3, 9) = C;

  const Matrix12d Phi = Matrix12d::Identity() + F * dt;

  // Qd = G diag(q_f, q_w, eps I6) G^T dt, with accel noise entering the
  // velocity error through C and gyro noise entering the attitude error.
  Matrix12d Qd = Matrix12d::Zero();
  Qd.block<3, 3>(0, 0) = C * q.q_f.asDiagonal() * C.transpose() * dt;
  Qd.block<3, 3>(3, 3) = C * q.q_w.asDiagonal() * C.transpose() * dt;
  Qd.block<3, 3>(6, 6) = Eigen::Matrix3d::Identity() * q.eps_bias * dt;
  Qd.block<3, 3>(9, 9) = Eigen::Matrix3d::Identity() * q.eps_bias * dt;

  ErrorFilterState next = fs;
  next.P = Phi * fs.P * Phi.transpose() + Qd;
  if (ensure_psd(next.P)) ++next.psd_clamp_count;
  return next;
}

DvlUpdateResult dvl_update(const ErrorFilterState& fs, const NavState& state,
                           const DvlMeasurement& z) {
  using Matrix3x12 = Eigen::Matrix<double, 3, 12>;
  using Matrix12x3 = Eigen::Matrix<double, 12, 3>;

  Matrix3x12 H = Matrix3x12::Zero();
  H.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();

  const Eigen::Vector3d nu = z.v_meas - state.v_n;
  const Eigen::Matrix3d S = H * fs.P * H.transpose() + z.R;
  const Eigen::LLT<Eigen::Matrix3d> chol(S);
  if (chol.info() != Eigen::Success) {
    throw std::runtime_error("dvl_update: innovation covariance not PD");
  }
  const Matrix12x3 K = chol.solve((H * fs.P).eval()).transpose();
  const Eigen::Matrix<double, 12, 1> dx = K * nu;

  DvlUpdateResult out;
  out.innovation = nu;
  out.innovation_cov = S;

  out.fs = fs;
  const Matrix12d IKH = Matrix12d::Identity() - K * H;
  out.fs.P = IKH * fs.P * IKH.transpose() + K * z.R * K.transpose();
  out.fs.P = 0.5 * (out.fs.P + out.fs.P.transpose()).eval();
  out.fs.b_a = fs.b_a + dx.segment<3>(6);
  out.fs.b_g = fs.b_g + dx.segment<3>(9);
  out.fs.last_innovation = nu;

  // closed-loop injection; error estimate resets to zero
  out.nav = state;
  out.nav.v_n = state.v_n + dx.segment<3>(0);
  out.nav.q_bn =
      (quat_from_rotvec(-dx.segment<3>(3)) * state.q_bn).normalized();
  return out;
}

}  // namespace auvnav
