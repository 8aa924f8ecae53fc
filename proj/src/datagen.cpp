#include "auvnav/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "auvnav/textio.hpp"

namespace auvnav {
namespace {

constexpr const char* kTransformNames[] = {"detrend", "normalize", "abs"};
constexpr const char* kStatNames[] = {"min",      "max",      "median",
                                      "std",      "mean",     "kurtosis",
                                      "skewness", "second_max"};

std::string dataset_header() {
  std::string h = "trajectory,channel,label_q,window_start";
  for (const char* t : kTransformNames) {
    for (const char* s : kStatNames) {
      h += ',';
      h += t;
      h += '_';
      h += s;
    }
  }
  return h;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void check_noise_spec(const ProcessNoiseSpec& noise) {
  for (int i = 0; i < 3; ++i) {
    if (!(noise.q_f[i] >= 0.0) || !(noise.q_w[i] >= 0.0) ||
        !std::isfinite(noise.q_f[i]) || !std::isfinite(noise.q_w[i])) {
      throw std::invalid_argument("corrupt: noise variances must be finite "
                                  "and non-negative");
    }
  }
}

}  // namespace

std::vector<double> noise_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("noise_grid: need 0 < lo < hi");
  }
  if (n < 2) throw std::invalid_argument("noise_grid: need n >= 2");
  std::vector<double> grid(static_cast<std::size_t>(n));
  const double step = (std::log(hi) - std::log(lo)) / (n - 1);
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + i * step);
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<SyntheticTruth> generate_baselines(double rate_hz,
                                               double duration) {
  std::vector<SyntheticTruth> out;
  for (const AnalyticTrajectory& traj : baseline_trajectories(duration)) {
    out.push_back(inverse_mechanize(traj, rate_hz));
  }
  return out;
}

std::vector<ImuSample> corrupt(std::span<const ImuSample> clean,
                               const ProcessNoiseSpec& noise, Rng& rng) {
  check_noise_spec(noise);
  const Eigen::Vector3d sd_f = noise.q_f.cwiseSqrt();
  const Eigen::Vector3d sd_w = noise.q_w.cwiseSqrt();
  std::vector<ImuSample> out(clean.begin(), clean.end());
  for (ImuSample& s : out) {
    for (int i = 0; i < 3; ++i) s.f_b[i] += sd_f[i] * rng.normal();
    for (int i = 0; i < 3; ++i) s.w_ib[i] += sd_w[i] * rng.normal();
  }
  return out;
}

double channel_value(const ImuSample& s, Channel c) {
  switch (c) {
    case Channel::ax: return s.f_b.x();
    case Channel::ay: return s.f_b.y();
    case Channel::az: return s.f_b.z();
    case Channel::gx: return s.w_ib.x();
    case Channel::gy: return s.w_ib.y();
    case Channel::gz: return s.w_ib.z();
  }
  throw std::invalid_argument("channel_value: bad channel");
}

Dataset build_dataset(const DatasetParams& p) {
  if (!(p.rate_hz > 0.0) || !(p.duration > 0.0)) {
    throw std::invalid_argument("build_dataset: rate and duration must be "
                                "positive");
  }
  if (p.window < 4) {
    throw std::invalid_argument("build_dataset: window too short for the "
                                "feature stats");
  }
  if (!(p.test_fraction > 0.0) || !(p.test_fraction < 1.0)) {
    throw std::invalid_argument("build_dataset: test_fraction must lie in "
                                "(0, 1)");
  }

  const auto n_samples =
      static_cast<std::size_t>(std::llround(p.rate_hz * p.duration));
  const std::size_t n_windows = n_samples / p.window;
  if (n_windows < 2) {
    throw std::invalid_argument("build_dataset: record too short to split");
  }
  const auto n_test = static_cast<std::size_t>(
      std::lround(p.test_fraction * static_cast<double>(n_windows)));
  if (n_test < 1 || n_test >= n_windows) {
    throw std::invalid_argument("build_dataset: degenerate train/test split");
  }

  const std::vector<double> grid =
      noise_grid(p.noise_lo, p.noise_hi, p.noise_levels);
  const std::vector<AnalyticTrajectory> trajs =
      baseline_trajectories(p.duration);

  Dataset ds;
  ds.params = p;
  std::vector<double> series(p.window);
  std::vector<std::uint32_t> perm(n_windows);
  std::vector<std::uint8_t> is_test(n_windows);

  for (std::size_t ti = 0; ti < trajs.size(); ++ti) {
    const SyntheticTruth base = inverse_mechanize(trajs[ti], p.rate_hz);
    for (std::size_t qi = 0; qi < grid.size(); ++qi) {
      const std::uint64_t cell = ti * grid.size() + qi;
      Rng noise_rng = Rng::stream(p.seed, 2 * cell);
      Rng split_rng = Rng::stream(p.seed, 2 * cell + 1);
      const std::vector<ImuSample> noisy = corrupt(
          base.imu, ProcessNoiseSpec::isotropic(grid[qi], grid[qi]),
          noise_rng);

      std::iota(perm.begin(), perm.end(), 0u);
      std::fill(is_test.begin(), is_test.end(), 0);
      for (std::size_t i = 0; i < n_test; ++i) {
        const std::size_t j = i + split_rng.bounded(n_windows - i);
        std::swap(perm[i], perm[j]);
        is_test[perm[i]] = 1;
      }

      for (std::size_t ci = 0; ci < kImuChannels; ++ci) {
        const auto ch = static_cast<Channel>(ci);
        for (std::size_t w = 0; w < n_windows; ++w) {
          const std::size_t start = w * p.window;
          for (std::size_t k = 0; k < p.window; ++k) {
            series[k] = channel_value(noisy[start + k], ch);
          }
          DatasetRow row;
          row.trajectory = trajs[ti].id;
          row.channel = ch;
          row.label = grid[qi];
          row.window_start = start;
          row.features = extract_features(Window{series, ch}, p.window);
          (is_test[w] ? ds.test : ds.train).push_back(std::move(row));
        }
      }
    }
  }
  return ds;
}

std::vector<TrainingExample> to_examples(std::span<const DatasetRow> rows) {
  std::vector<TrainingExample> out;
  out.reserve(rows.size());
  for (const DatasetRow& r : rows) {
    out.push_back(TrainingExample{r.features, r.label});
  }
  return out;
}

void write_dataset_csv(std::span<const DatasetRow> rows,
                       const DatasetParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_dataset_csv: cannot open " + path);
  out << "# format_version 1\n";
  out << "# rate_hz " << format_double(p.rate_hz) << "\n";
  out << "# duration " << format_double(p.duration) << "\n";
  out << "# window " << p.window << "\n";
  out << "# noise_levels " << p.noise_levels << "\n";
  out << "# noise_lo " << format_double(p.noise_lo) << "\n";
  out << "# noise_hi " << format_double(p.noise_hi) << "\n";
  out << "# test_fraction " << format_double(p.test_fraction) << "\n";
  out << "# seed " << p.seed << "\n";
  out << "# rows " << rows.size() << "\n";
  out << dataset_header() << "\n";
  for (const DatasetRow& r : rows) {
    out << r.trajectory << ',' << channel_name(r.channel) << ','
        << format_double(r.label) << ',' << r.window_start;
    for (double f : r.features) out << ',' << format_double(f);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_dataset_csv: write failed: " + path);
}

std::vector<DatasetRow> read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_dataset_csv: cannot open " + path);
  std::string line;
  bool header_seen = false;
  std::vector<DatasetRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != dataset_header()) {
        throw std::runtime_error("read_dataset_csv: unexpected header in " +
                                 path);
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 4 + kFeatureCount) {
      throw std::runtime_error("read_dataset_csv: bad column count in " + path);
    }
    DatasetRow r;
    r.trajectory = fields[0];
    r.channel = channel_from_name(fields[1]);
    r.label = parse_double(fields[2]);
    r.window_start = static_cast<std::size_t>(parse_long(fields[3]));
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      r.features[i] = parse_double(fields[4 + i]);
    }
    rows.push_back(std::move(r));
  }
  if (!header_seen) {
    throw std::runtime_error("read_dataset_csv: no header in " + path);
  }
  return rows;
}

EvalRun synthesize_eval_run(const AnalyticTrajectory& traj,
                            const ProcessNoiseSpec& imu_noise, double dvl_var,
                            double dtau, double rate_hz, std::uint64_t seed) {
  if (!(rate_hz > 0.0) || !(dtau > 0.0)) {
    throw std::invalid_argument("synthesize_eval_run: rate and dtau must be "
                                "positive");
  }
  if (!(dvl_var >= 0.0) || !std::isfinite(dvl_var)) {
    throw std::invalid_argument("synthesize_eval_run: dvl_var must be finite "
                                "and non-negative");
  }
  const double steps_real = dtau * rate_hz;
  const auto steps_per_fix = static_cast<std::size_t>(std::llround(steps_real));
  if (steps_per_fix < 1 ||
      std::abs(steps_real - static_cast<double>(steps_per_fix)) > 1e-9) {
    throw std::invalid_argument("synthesize_eval_run: dtau must be an integer "
                                "multiple of the IMU period");
  }

  EvalRun run;
  run.truth = inverse_mechanize(traj, rate_hz);
  Rng imu_rng = Rng::stream(seed, 0);
  Rng dvl_rng = Rng::stream(seed, 1);
  run.imu = corrupt(run.truth.imu, imu_noise, imu_rng);
  run.R = dvl_var * Eigen::Matrix3d::Identity();

  const double sd = std::sqrt(dvl_var);
  const std::size_t n_fixes =
      static_cast<std::size_t>(
          std::floor(traj.duration / dtau + 1e-9));
  for (std::size_t k = 1; k <= n_fixes; ++k) {
    const std::size_t idx = k * steps_per_fix - 1;
    if (idx >= run.truth.truth.size()) break;
    DvlFix fix;
    fix.t = static_cast<double>(k) * dtau;
    fix.after_sample = idx;
    fix.v_meas = run.truth.truth[idx].v_n;
    for (int i = 0; i < 3; ++i) fix.v_meas[i] += sd * dvl_rng.normal();
    run.dvl.push_back(fix);
  }
  return run;
}

}  // namespace auvnav
