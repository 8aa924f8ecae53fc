#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "auvnav/ensemble.hpp"
#include "auvnav/eskf.hpp"
#include "auvnav/features.hpp"

namespace auvnav {

/// Q fixed at construction. Passing 20x the true sensor noise reproduces the
/// usual mistuned baseline.
struct ConstantQ {
  ProcessNoiseSpec spec = ProcessNoiseSpec::isotropic(0.01, 0.001);
};

/// Innovation-based scaling: the trace ratio between the sample covariance of
/// the last `window` DVL innovations and the predicted innovation covariance
/// rescales the current Q at every update.
struct InnovationAdaptiveQ {
  int window = 1;
};

/// Per-channel variance regression on trailing raw IMU windows, refreshed
/// every tuning_rate seconds.
struct LearnedQ {
  std::shared_ptr<const TreeEnsemble> model;
  double tuning_rate = 1.0;
};

using QStrategy = std::variant<ConstantQ, InnovationAdaptiveQ, LearnedQ>;

std::string strategy_name(const QStrategy& s);

ProcessNoiseSpec next_q_constant(const ConstantQ& s);

/// innovations holds past DVL innovations, most recent last; P_prior is the
/// pre-update error covariance at the current epoch. With no history yet the
/// current spec is returned unchanged. The scale factor is clamped to
/// [0.1, 10] per call and components are floored at 1e-12 so Q stays positive.
ProcessNoiseSpec next_q_innovation(const InnovationAdaptiveQ& s,
                                   std::span<const Eigen::Vector3d> innovations,
                                   const Matrix12d& P_prior,
                                   const Eigen::Matrix3d& R,
                                   const ProcessNoiseSpec& current);

/// windows must contain one window per IMU channel (any order, identified by
/// the channel tag) of exactly the model's training window length. Accel
/// channels feed q_f, gyro channels feed q_w; eps_bias carries over from
/// current.
ProcessNoiseSpec next_q_learned(const LearnedQ& s,
                                std::span<const Window> windows,
                                const ProcessNoiseSpec& current);

/// Text forms: "constant", "constant:<qf>,<qw>", "adaptive",
/// "adaptive:<window>", "learned:<model.json>". Throws std::invalid_argument
/// on anything else.
QStrategy parse_strategy(const std::string& text);

}  // namespace auvnav
