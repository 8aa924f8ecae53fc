#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace auvnav {

inline constexpr std::size_t kWindowLength = 200;
inline constexpr std::size_t kFeatureCount = 24;
inline constexpr std::size_t kImuChannels = 6;

enum class Channel { ax, ay, az, gx, gy, gz };

const char* channel_name(Channel c);
Channel channel_from_name(const std::string& name);
bool is_accel_channel(Channel c);

// One IMU channel slice of N consecutive samples.
struct Window {
  std::vector<double> samples;
  Channel channel = Channel::ax;
};

// 24 features, transform-major: detrend[0..7], normalize[8..15],
// absolute[16..23]. Statistic order within a block: min, max, median, std,
// mean, kurtosis, skewness, second max.
using FeatureVector = std::array<double, kFeatureCount>;

/// Removes the least-squares straight-line fit over the sample index.
/// Requires at least 2 samples.
std::vector<double> detrend(std::span<const double> x);

/// (x - mean) / std with the N-1 divisor; a constant series maps to zeros.
std::vector<double> gauss_normalize(std::span<const double> x);

std::vector<double> abs_series(std::span<const double> x);

// min, max, median, std (N-1), mean, kurtosis (m4/m2^2, normal -> 3),
// skewness (m3/m2^1.5), second max. Zero-variance input yields kurtosis and
// skewness of 0. Requires at least 4 samples.
std::array<double, 8> low_level_stats(std::span<const double> x);

/// Full two-step pipeline for one window. The window length is checked
/// against `expected_n` (the dataset recipe default is 200).
FeatureVector extract_features(const Window& w,
                               std::size_t expected_n = kWindowLength);

}  // namespace auvnav
