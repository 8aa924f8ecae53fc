#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "auvnav/features.hpp"
#include "auvnav/rng.hpp"
#include "oracles.hpp"

using namespace auvnav;

namespace {

bool close_rel(double a, long double b, double tol = 1e-9) {
  const long double diff = std::abs(static_cast<long double>(a) - b);
  const long double scale = std::max<long double>(
      {1.0L, std::abs(static_cast<long double>(a)), std::abs(b)});
  return diff <= tol * scale;
}

std::vector<double> random_window(Rng& rng, std::size_t n) {
  const double scale = std::pow(10.0, rng.uniform01() * 6.0 - 3.0);
  const double offset = rng.normal(0.0, 5.0);
  const double slope = rng.normal(0.0, 0.1) * scale;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = offset + slope * static_cast<double>(i) + scale * rng.normal();
  }
  return w;
}

}  // namespace

TEST_CASE("detrend removes exact linear series") {
  const std::vector<double> x{1, 2, 3, 4};
  const auto out = detrend(x);
  for (double v : out) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("detrend of a constant series is zero") {
  const std::vector<double> x(16, 3.7);
  for (double v : detrend(x)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("detrend matches the least-squares oracle on [0,1,0,1]") {
  const std::vector<double> x{0, 1, 0, 1};
  const auto out = detrend(x);
  const double expect[] = {-0.2, 0.6, -0.6, 0.2};
  for (int i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(expect[i]).epsilon(1e-9));
  const auto ref = oracle::detrend(x);
  for (int i = 0; i < 4; ++i) CHECK(close_rel(out[i], ref[i]));
}

TEST_CASE("detrend output has zero mean and zero index correlation") {
  Rng rng = Rng::stream(11, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const auto w = random_window(rng, 64);
    const auto out = detrend(w);
    double mean = 0.0;
    double corr = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      mean += out[i];
      corr += (static_cast<double>(i) - 31.5) * out[i];
    }
    const double scale = std::abs(w[0]) + 1.0;
    CHECK(std::abs(mean / 64.0) < 1e-9 * scale);
    CHECK(std::abs(corr / 64.0) < 1e-9 * scale * 64);
  }
}

TEST_CASE("detrend rejects short input") {
  CHECK_THROWS_AS(detrend(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("gauss_normalize two-point example") {
  const std::vector<double> x{-1, 1};
  const auto out = gauss_normalize(x);
  CHECK(out[0] == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(out[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("gauss_normalize constant series degenerates to zeros") {
  const std::vector<double> x(8, 42.0);
  for (double v : gauss_normalize(x)) CHECK(v == 0.0);
}

TEST_CASE("gauss_normalize is affine invariant") {
  Rng rng = Rng::stream(12, 0);
  const auto w = random_window(rng, 32);
  std::vector<double> v(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) v[i] = 2.5 * w[i] - 7.0;
  const auto a = gauss_normalize(w);
  const auto b = gauss_normalize(v);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("gauss_normalize output has mean 0 and sample std 1") {
  Rng rng = Rng::stream(13, 0);
  const auto w = random_window(rng, 100);
  const auto out = gauss_normalize(w);
  double mean = 0.0;
  for (double x : out) mean += x;
  mean /= 100.0;
  double ss = 0.0;
  for (double x : out) ss += (x - mean) * (x - mean);
  CHECK(std::abs(mean) < 1e-12);
  CHECK(std::sqrt(ss / 99.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("abs_series examples") {
  const std::vector<double> x{-1, 2, -3};
  const auto out = abs_series(x);
  CHECK(out == std::vector<double>{1, 2, 3});

  const std::vector<double> pos{0, 1, 2};
  CHECK(abs_series(pos) == pos);

  std::vector<double> neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
  CHECK(abs_series(x) == abs_series(neg));
}

TEST_CASE("low_level_stats on [1,2,3,4]") {
  const std::vector<double> x{1, 2, 3, 4};
  const auto s = low_level_stats(x);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 4.0);
  CHECK(s[2] == doctest::Approx(2.5));
  CHECK(s[3] == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s[4] == doctest::Approx(2.5));
  CHECK(s[5] == doctest::Approx(1.64));
  CHECK(s[6] == doctest::Approx(0.0));
  CHECK(s[7] == 3.0);
}

TEST_CASE("low_level_stats constant series degenerate rule") {
  const std::vector<double> x(6, 2.5);
  const auto s = low_level_stats(x);
  CHECK(s[0] == 2.5);
  CHECK(s[1] == 2.5);
  CHECK(s[2] == 2.5);
  CHECK(s[3] == 0.0);
  CHECK(s[4] == 2.5);
  CHECK(s[5] == 0.0);
  CHECK(s[6] == 0.0);
  CHECK(s[7] == 2.5);
}

TEST_CASE("low_level_stats mirror flips skewness sign") {
  const std::vector<double> x{0.1, 0.2, 0.3, 1.5, 0.05, -0.4};
  std::vector<double> m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) m[i] = -x[i];
  const auto a = low_level_stats(x);
  const auto b = low_level_stats(m);
  CHECK(a[6] == doctest::Approx(-b[6]).epsilon(1e-12));
}

TEST_CASE("second_max counts duplicates") {
  const std::vector<double> x{5, 5, 1, 0};
  CHECK(low_level_stats(x)[7] == 5.0);
}

TEST_CASE("low_level_stats rejects short input") {
  CHECK_THROWS_AS(low_level_stats(std::vector<double>{1, 2, 3}),
                  std::invalid_argument);
}

TEST_CASE("extract_features of a constant window") {
  Window w;
  w.samples.assign(kWindowLength, -3.0);
  const auto f = extract_features(w);
  for (int i = 0; i < 8; ++i) CHECK(f[static_cast<std::size_t>(i)] == 0.0);
  for (int i = 8; i < 16; ++i) CHECK(f[static_cast<std::size_t>(i)] == 0.0);
  CHECK(f[16] == 3.0);
  CHECK(f[17] == 3.0);
  CHECK(f[18] == 3.0);
  CHECK(f[19] == 0.0);
  CHECK(f[20] == 3.0);
  CHECK(f[23] == 3.0);
}

TEST_CASE("extract_features is deterministic and rejects bad lengths") {
  Rng rng = Rng::stream(14, 0);
  Window w;
  w.samples = random_window(rng, kWindowLength);
  const auto a = extract_features(w);
  const auto b = extract_features(w);
  CHECK(a == b);

  Window bad;
  bad.samples.assign(kWindowLength - 1, 0.0);
  CHECK_THROWS_AS(extract_features(bad), std::invalid_argument);
}

TEST_CASE("block order statistics are consistent") {
  Rng rng = Rng::stream(15, 0);
  for (int rep = 0; rep < 10; ++rep) {
    Window w;
    w.samples = random_window(rng, kWindowLength);
    const auto f = extract_features(w);
    for (int b = 0; b < 3; ++b) {
      const std::size_t o = static_cast<std::size_t>(8 * b);
      CHECK(f[o] <= f[o + 7]);      // min <= second_max
      CHECK(f[o + 7] <= f[o + 1]);  // second_max <= max
    }
  }
}

TEST_CASE("scaling a zero-mean window scales the detrend block") {
  Rng rng = Rng::stream(16, 0);
  std::vector<double> w = random_window(rng, kWindowLength);
  double mean = 0.0;
  for (double v : w) mean += v;
  mean /= static_cast<double>(w.size());
  for (double& v : w) v -= mean;

  std::vector<double> scaled(w.size());
  const double a = 7.25;
  for (std::size_t i = 0; i < w.size(); ++i) scaled[i] = a * w[i];

  const auto f1 = extract_features(Window{w, Channel::ax});
  const auto f2 = extract_features(Window{scaled, Channel::ax});
  const std::size_t linear[] = {0, 1, 2, 3, 4, 7};
  for (std::size_t i : linear) {
    CHECK(f2[i] == doctest::Approx(a * f1[i]).epsilon(1e-9));
  }
  for (std::size_t i = 8; i < 16; ++i) {
    CHECK(f2[i] == doctest::Approx(f1[i]).epsilon(1e-9));
  }
}

TEST_CASE("feature pipeline matches the brute-force oracle") {
  Rng rng = Rng::stream(17, 0);
  for (int rep = 0; rep < 200; ++rep) {
    Window w;
    w.samples = random_window(rng, kWindowLength);
    const auto got = extract_features(w);
    const auto ref = oracle::features(w.samples);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      CAPTURE(rep);
      CAPTURE(i);
      CHECK(close_rel(got[i], ref[i]));
    }
  }
}
