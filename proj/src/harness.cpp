#include "auvnav/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "auvnav/strapdown.hpp"
#include "auvnav/textio.hpp"
#include "json.hpp"

namespace auvnav {
namespace {

std::size_t steps_for(double interval, double rate_hz, const char* what) {
  const double real = interval * rate_hz;
  const auto steps = static_cast<std::size_t>(std::llround(real));
  if (steps < 1 || std::abs(real - static_cast<double>(steps)) > 1e-9) {
    throw std::invalid_argument(std::string(what) +
                                " must be a positive integer multiple of the "
                                "IMU period");
  }
  return steps;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void validate_config(const RunConfig& cfg) {
  if (!(cfg.rate_hz > 0.0)) {
    throw std::invalid_argument("config: rate_hz must be positive");
  }
  if (!(cfg.duration > 0.0)) {
    throw std::invalid_argument("config: duration must be positive");
  }
  steps_for(cfg.dtau, cfg.rate_hz, "config: dvl interval");
  steps_for(cfg.tuning_rate, cfg.rate_hz, "config: tuning rate");
  if (cfg.runs < 1) throw std::invalid_argument("config: runs must be >= 1");
  if (!(cfg.dvl_var >= 0.0)) {
    throw std::invalid_argument("config: dvl_var must be non-negative");
  }
  if (!cfg.initial_q.positive()) {
    throw std::invalid_argument("config: initial process noise must be "
                                "positive");
  }
}

RunMetrics run_filter(const EvalRun& run, const QStrategy& strategy,
                      const RunConfig& cfg) {
  validate_config(cfg);
  if (run.imu.empty() || run.imu.size() != run.truth.truth.size()) {
    throw std::invalid_argument("run_filter: malformed evaluation run");
  }

  const double dt = 1.0 / cfg.rate_hz;
  const StrapdownParams params =
      StrapdownParams::at_latitude(run.truth.initial.lat);

  NavState nav = run.truth.initial;
  ErrorFilterState fs;
  fs.P = initial_covariance();

  ProcessNoiseSpec q = cfg.initial_q;
  if (const auto* c = std::get_if<ConstantQ>(&strategy)) {
    q = next_q_constant(*c);
  }

  const auto* learned = std::get_if<LearnedQ>(&strategy);
  const auto* adaptive = std::get_if<InnovationAdaptiveQ>(&strategy);
  std::size_t steps_per_tune = 0;
  std::size_t window_len = 0;
  std::array<std::vector<double>, kImuChannels> hist;
  if (learned) {
    if (!learned->model) {
      throw std::invalid_argument("run_filter: learned strategy without a "
                                  "model");
    }
    steps_per_tune = steps_for(learned->tuning_rate, cfg.rate_hz,
                               "run_filter: tuning rate");
    window_len = learned->model->window_length;
    for (auto& h : hist) h.reserve(run.imu.size());
  }

  std::vector<Eigen::Vector3d> innov_hist;
  std::vector<Window> wins;
  RunMetrics m;
  std::size_t fix_i = 0;

  for (std::size_t i = 0; i < run.imu.size(); ++i) {
    const ImuSample& raw = run.imu[i];

    if (learned) {
      for (std::size_t c = 0; c < kImuChannels; ++c) {
        hist[c].push_back(channel_value(raw, static_cast<Channel>(c)));
      }
      if ((i + 1) % steps_per_tune == 0 && hist[0].size() >= window_len) {
        wins.clear();
        for (std::size_t c = 0; c < kImuChannels; ++c) {
          Window w;
          w.channel = static_cast<Channel>(c);
          w.samples.assign(hist[c].end() - static_cast<std::ptrdiff_t>(
                                               window_len),
                           hist[c].end());
          wins.push_back(std::move(w));
        }
        q = next_q_learned(*learned, wins, q);
      }
    }

    ImuSample corrected = raw;
    corrected.f_b -= fs.b_a;
    corrected.w_ib -= fs.b_g;
    const NavState nav_next = mechanize(nav, corrected, dt, params);
    fs = propagate(fs, nav, corrected, q, dt);
    nav = nav_next;

    if (fix_i < run.dvl.size() && run.dvl[fix_i].after_sample == i) {
      const DvlFix& fix = run.dvl[fix_i];
      if (adaptive) {
        innov_hist.push_back(fix.v_meas - nav.v_n);
        q = next_q_innovation(*adaptive, innov_hist, fs.P, run.R, q);
      }
      DvlMeasurement meas;
      meas.v_meas = fix.v_meas;
      meas.R = run.R;
      const DvlUpdateResult res = dvl_update(fs, nav, meas);
      fs = res.fs;
      nav = res.nav;
      m.epoch_t.push_back(fix.t);
      m.velocity_error.push_back(run.truth.truth[i].v_n - nav.v_n);
      m.innovation.push_back(res.innovation);
      m.q_sum.push_back(q.q_f.sum() + q.q_w.sum());
      ++fix_i;
    }
  }

  m.psd_clamp_count = fs.psd_clamp_count;
  m.srmse = srmse(m.velocity_error);
  m.smae = smae(m.velocity_error);
  return m;
}

double srmse(std::span<const Eigen::Vector3d> errors) {
  if (errors.empty()) throw std::invalid_argument("srmse: no epochs");
  double sum = 0.0;
  for (const Eigen::Vector3d& e : errors) sum += e.squaredNorm();
  return std::sqrt(sum / static_cast<double>(errors.size()));
}

double smae(std::span<const Eigen::Vector3d> errors) {
  if (errors.empty()) throw std::invalid_argument("smae: no epochs");
  double sum = 0.0;
  for (const Eigen::Vector3d& e : errors) sum += e.cwiseAbs().sum();
  return sum / static_cast<double>(errors.size());
}

ComparisonTable monte_carlo(const RunConfig& cfg,
                            const std::vector<QStrategy>& strategies) {
  validate_config(cfg);
  if (strategies.empty()) {
    throw std::invalid_argument("monte_carlo: no strategies");
  }

  const AnalyticTrajectory traj =
      trajectory_by_id(cfg.trajectory, cfg.duration);

  ComparisonTable table;
  table.config = cfg;
  for (const QStrategy& s : strategies) {
    ComparisonRow row;
    row.name = strategy_name(s);
    table.rows.push_back(std::move(row));
  }

  for (int r = 0; r < cfg.runs; ++r) {
    const std::uint64_t run_seed =
        Rng::stream(cfg.seed, static_cast<std::uint64_t>(r)).next_u64();
    const EvalRun run = synthesize_eval_run(traj, cfg.imu_noise, cfg.dvl_var,
                                            cfg.dtau, cfg.rate_hz, run_seed);
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      const RunMetrics m = run_filter(run, strategies[s], cfg);
      table.rows[s].srmse_runs.push_back(m.srmse);
      table.rows[s].smae_runs.push_back(m.smae);
    }
  }

  for (ComparisonRow& row : table.rows) {
    double sr = 0.0;
    double sa = 0.0;
    for (double v : row.srmse_runs) sr += v;
    for (double v : row.smae_runs) sa += v;
    row.mean_srmse = sr / static_cast<double>(row.srmse_runs.size());
    row.mean_smae = sa / static_cast<double>(row.smae_runs.size());
  }
  return table;
}

std::string render_report(const ComparisonTable& table) {
  const RunConfig& cfg = table.config;
  std::string out;
  out += "velocity-aided navigation comparison\n";
  out += "trajectory:      " + cfg.trajectory + "\n";
  out += "duration_s:      " + format_double(cfg.duration) + "\n";
  out += "imu_rate_hz:     " + format_double(cfg.rate_hz) + "\n";
  out += "dvl_interval_s:  " + format_double(cfg.dtau) + "\n";
  out += "dvl_var:         " + format_double(cfg.dvl_var) + "\n";
  out += "imu_accel_var:   " + format_double(cfg.imu_noise.q_f.x()) + "\n";
  out += "imu_gyro_var:    " + format_double(cfg.imu_noise.q_w.x()) + "\n";
  out += "runs:            " + std::to_string(cfg.runs) + "\n";
  out += "seed:            " + std::to_string(cfg.seed) + "\n";
  out += "\n";

  std::size_t width = 8;
  for (const ComparisonRow& row : table.rows) {
    width = std::max(width, row.name.size());
  }
  out += "strategy";
  out.append(width - 8 + 2, ' ');
  out += "srmse_mean  smae_mean\n";
  for (const ComparisonRow& row : table.rows) {
    out += row.name;
    out.append(width - row.name.size() + 2, ' ');
    out += fixed6(row.mean_srmse) + "    " + fixed6(row.mean_smae) + "\n";
  }
  return out;
}

void write_report_csv(const ComparisonTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_report_csv: cannot open " + path);
  out << "# format_version 1\n";
  out << "strategy,run,srmse,smae\n";
  for (const ComparisonRow& row : table.rows) {
    for (std::size_t r = 0; r < row.srmse_runs.size(); ++r) {
      out << row.name << ',' << r << ',' << format_double(row.srmse_runs[r])
          << ',' << format_double(row.smae_runs[r]) << '\n';
    }
  }
  for (const ComparisonRow& row : table.rows) {
    out << row.name << ",mean," << format_double(row.mean_srmse) << ','
        << format_double(row.mean_smae) << '\n';
  }
  if (!out) throw std::runtime_error("write_report_csv: write failed: " + path);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_run_config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_run_config: bad JSON in " + path + ": " +
                             e.what());
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1) {
    throw std::runtime_error("load_run_config: unsupported format_version");
  }
  RunConfig cfg;
  if (j.contains("trajectory")) cfg.trajectory = j["trajectory"].get<std::string>();
  if (j.contains("duration")) cfg.duration = j["duration"].get<double>();
  if (j.contains("rate_hz")) cfg.rate_hz = j["rate_hz"].get<double>();
  if (j.contains("dvl_interval")) cfg.dtau = j["dvl_interval"].get<double>();
  if (j.contains("tuning_rate")) cfg.tuning_rate = j["tuning_rate"].get<double>();
  if (j.contains("imu_accel_var")) {
    cfg.imu_noise.q_f.setConstant(j["imu_accel_var"].get<double>());
  }
  if (j.contains("imu_gyro_var")) {
    cfg.imu_noise.q_w.setConstant(j["imu_gyro_var"].get<double>());
  }
  if (j.contains("dvl_var")) cfg.dvl_var = j["dvl_var"].get<double>();
  if (j.contains("initial_qf")) {
    cfg.initial_q.q_f.setConstant(j["initial_qf"].get<double>());
  }
  if (j.contains("initial_qw")) {
    cfg.initial_q.q_w.setConstant(j["initial_qw"].get<double>());
  }
  if (j.contains("runs")) cfg.runs = j["runs"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  validate_config(cfg);
  return cfg;
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["trajectory"] = cfg.trajectory;
  j["duration"] = cfg.duration;
  j["rate_hz"] = cfg.rate_hz;
  j["dvl_interval"] = cfg.dtau;
  j["tuning_rate"] = cfg.tuning_rate;
  j["imu_accel_var"] = cfg.imu_noise.q_f.x();
  j["imu_gyro_var"] = cfg.imu_noise.q_w.x();
  j["dvl_var"] = cfg.dvl_var;
  j["initial_qf"] = cfg.initial_q.q_f.x();
  j["initial_qw"] = cfg.initial_q.q_w.x();
  j["runs"] = cfg.runs;
  j["seed"] = cfg.seed;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_run_config: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("save_run_config: write failed: " + path);
}

}  // namespace auvnav
