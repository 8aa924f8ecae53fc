#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "auvnav/ensemble.hpp"
#include "auvnav/eskf.hpp"
#include "auvnav/features.hpp"
#include "auvnav/rng.hpp"
#include "auvnav/trajectory.hpp"

namespace auvnav {

/// n log-spaced variance levels covering [lo, hi], endpoints exact.
std::vector<double> noise_grid(double lo = 0.001, double hi = 0.05, int n = 15);

/// IMU records for every baseline trajectory at the given rate.
std::vector<SyntheticTruth> generate_baselines(double rate_hz = 100.0,
                                               double duration = 400.0);

/// Adds iid zero-mean Gaussian noise per channel; q_f / q_w entries of
/// `noise` are variances. Draw order is fixed: per sample, accel xyz then
/// gyro xyz.
std::vector<ImuSample> corrupt(std::span<const ImuSample> clean,
                               const ProcessNoiseSpec& noise, Rng& rng);

double channel_value(const ImuSample& s, Channel c);

struct DatasetRow {
  std::string trajectory;
  Channel channel = Channel::ax;
  double label = 0.0;
  std::size_t window_start = 0;
  FeatureVector features{};
};

struct DatasetParams {
  double rate_hz = 100.0;
  double duration = 400.0;
  std::size_t window = kWindowLength;
  int noise_levels = 15;
  double noise_lo = 0.001;
  double noise_hi = 0.05;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct Dataset {
  DatasetParams params;
  std::vector<DatasetRow> train;
  std::vector<DatasetRow> test;
};

/// Corrupts each baseline at every grid level, slices the record into
/// non-overlapping windows, extracts features per channel, and splits
/// train/test by window index, stratified so every (trajectory, level) cell
/// contributes the same exact test share.
Dataset build_dataset(const DatasetParams& p);

std::vector<TrainingExample> to_examples(std::span<const DatasetRow> rows);

void write_dataset_csv(std::span<const DatasetRow> rows,
                       const DatasetParams& p, const std::string& path);
std::vector<DatasetRow> read_dataset_csv(const std::string& path);

struct DvlFix {
  double t = 0.0;
  std::size_t after_sample = 0;
  Eigen::Vector3d v_meas = Eigen::Vector3d::Zero();
};

struct EvalRun {
  SyntheticTruth truth;
  std::vector<ImuSample> imu;
  std::vector<DvlFix> dvl;
  Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
};

/// Noisy IMU plus DVL fixes every dtau seconds (fix k lands after the sample
/// ending at t = k * dtau and measures the true velocity there plus
/// N(0, dvl_var) per axis). Streams: IMU noise and DVL noise are derived
/// independently from `seed`.
EvalRun synthesize_eval_run(const AnalyticTrajectory& traj,
                            const ProcessNoiseSpec& imu_noise, double dvl_var,
                            double dtau, double rate_hz, std::uint64_t seed);

}  // namespace auvnav
