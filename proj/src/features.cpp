#include "auvnav/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace auvnav {

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::ax: return "ax";
    case Channel::ay: return "ay";
    case Channel::az: return "az";
    case Channel::gx: return "gx";
    case Channel::gy: return "gy";
    case Channel::gz: return "gz";
  }
  throw std::invalid_argument("channel_name: bad channel");
}

Channel channel_from_name(const std::string& name) {
  if (name == "ax") return Channel::ax;
  if (name == "ay") return Channel::ay;
  if (name == "az") return Channel::az;
  if (name == "gx") return Channel::gx;
  if (name == "gy") return Channel::gy;
  if (name == "gz") return Channel::gz;
  throw std::invalid_argument("unknown channel tag: " + name);
}

bool is_accel_channel(Channel c) {
  return c == Channel::ax || c == Channel::ay || c == Channel::az;
}

namespace {

bool all_equal(std::span<const double> x) {
  for (double v : x) {
    if (v != x[0]) return false;
  }
  return true;
}

}  // namespace

std::vector<double> detrend(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("detrend: need at least 2 samples");
  // constant series: the fitted line is the series itself, residuals vanish
  if (all_equal(x)) return std::vector<double>(n, 0.0);

  // least-squares line over the 0-based sample index
  const double n_d = static_cast<double>(n);
  const double idx_mean = 0.5 * (n_d - 1.0);
  double y_mean = 0.0;
  for (double v : x) y_mean += v;
  y_mean /= n_d;

  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - idx_mean;
    sxy += dx * (x[i] - y_mean);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  const double intercept = y_mean - slope * idx_mean;

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = x[i] - (intercept + slope * static_cast<double>(i));
  }
  return out;
}

std::vector<double> gauss_normalize(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) {
    throw std::invalid_argument("gauss_normalize: need at least 2 samples");
  }
  if (all_equal(x)) return std::vector<double>(n, 0.0);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> out(n);
  if (sd == 0.0) return out;  // degenerate rule: constant series -> zeros
  for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - mean) / sd;
  return out;
}

std::vector<double> abs_series(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [](double v) { return std::abs(v); });
  return out;
}

std::array<double, 8> low_level_stats(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) {
    throw std::invalid_argument("low_level_stats: need at least 4 samples");
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  const double mn = sorted.front();
  const double mx = sorted.back();
  if (mn == mx) return {mn, mx, mn, 0.0, mn, 0.0, 0.0, mx};
  const double second_max = sorted[n - 2];
  const double median = (n % 2 == 1)
                            ? sorted[n / 2]
                            : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  const double n_d = static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n_d;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double sd = std::sqrt(m2 / (n_d - 1.0));
  m2 /= n_d;
  m3 /= n_d;
  m4 /= n_d;

  double kurtosis = 0.0;
  double skewness = 0.0;
  if (m2 > 0.0) {
    kurtosis = m4 / (m2 * m2);
    skewness = m3 / std::pow(m2, 1.5);
  }
  return {mn, mx, median, sd, mean, kurtosis, skewness, second_max};
}

FeatureVector extract_features(const Window& w, std::size_t expected_n) {
  if (w.samples.size() != expected_n) {
    throw std::invalid_argument("extract_features: window length mismatch");
  }
  const auto f1 = detrend(w.samples);
  const auto f2 = gauss_normalize(w.samples);
  const auto f3 = abs_series(w.samples);

  FeatureVector out{};
  const auto s1 = low_level_stats(f1);
  const auto s2 = low_level_stats(f2);
  const auto s3 = low_level_stats(f3);
  std::copy(s1.begin(), s1.end(), out.begin());
  std::copy(s2.begin(), s2.end(), out.begin() + 8);
  std::copy(s3.begin(), s3.end(), out.begin() + 16);
  return out;
}

}  // namespace auvnav
