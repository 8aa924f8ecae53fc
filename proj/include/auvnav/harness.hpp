#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "auvnav/datagen.hpp"
#include "auvnav/eskf.hpp"
#include "auvnav/qadapt.hpp"

namespace auvnav {

struct RunConfig {
  std::string trajectory = "eval-lawnmower";
  double duration = 330.0;
  double rate_hz = 100.0;
  double dtau = 1.0;
  double tuning_rate = 1.0;
  ProcessNoiseSpec imu_noise = ProcessNoiseSpec::isotropic(1e-4, 1e-6);
  double dvl_var = 0.01;
  ProcessNoiseSpec initial_q = ProcessNoiseSpec::isotropic(0.01, 0.001);
  int runs = 10;
  std::uint64_t seed = 0;
};

void validate_config(const RunConfig& cfg);

struct RunMetrics {
  double srmse = 0.0;
  double smae = 0.0;
  std::vector<double> epoch_t;
  std::vector<Eigen::Vector3d> velocity_error;
  std::vector<Eigen::Vector3d> innovation;
  std::vector<double> q_sum;
  long psd_clamp_count = 0;
};

/// Dead-reckons the noisy IMU record with DVL updates every dtau seconds,
/// letting the strategy drive the process noise, and scores the post-update
/// velocity error at each DVL epoch against the reference trajectory.
RunMetrics run_filter(const EvalRun& run, const QStrategy& strategy,
                      const RunConfig& cfg);

/// Speed-summed error norms over DVL epochs: srmse is the root mean of the
/// per-epoch squared-error sums, smae the mean of the per-epoch absolute
/// error sums.
double srmse(std::span<const Eigen::Vector3d> errors);
double smae(std::span<const Eigen::Vector3d> errors);

struct ComparisonRow {
  std::string name;
  std::vector<double> srmse_runs;
  std::vector<double> smae_runs;
  double mean_srmse = 0.0;
  double mean_smae = 0.0;
};

struct ComparisonTable {
  RunConfig config;
  std::vector<ComparisonRow> rows;
};

/// Runs every strategy on the same Monte-Carlo draws (run k of each strategy
/// sees identical sensor noise) and averages the scores.
ComparisonTable monte_carlo(const RunConfig& cfg,
                            const std::vector<QStrategy>& strategies);

std::string render_report(const ComparisonTable& table);
void write_report_csv(const ComparisonTable& table, const std::string& path);

RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& cfg, const std::string& path);

}  // namespace auvnav
