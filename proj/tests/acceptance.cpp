#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "auvnav/datagen.hpp"
#include "auvnav/ensemble.hpp"
#include "auvnav/harness.hpp"
#include "auvnav/qadapt.hpp"
#include "auvnav/strapdown.hpp"
#include "oracles.hpp"

using namespace auvnav;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(int idx, const std::string& title, bool pass, double secs,
            const std::string& detail) {
  std::printf("%s criterion %d: %s [%.1f s]%s%s\n", pass ? "PASS" : "FAIL",
              idx, title.c_str(), secs, detail.empty() ? "" : " ",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

bool close_rel(double a, double b, double tol) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tol * scale;
}

Window random_window(Rng& rng, bool degenerate) {
  Window w;
  w.channel = static_cast<Channel>(rng.bounded(kImuChannels));
  w.samples.resize(kWindowLength);
  const double scale = std::pow(10.0, rng.uniform01() * 6.0 - 3.0);
  const double offset = 5.0 * scale * rng.normal();
  const double slope = degenerate ? 0.0 : 0.02 * scale * rng.normal();
  for (std::size_t k = 0; k < w.samples.size(); ++k) {
    const double noise = degenerate ? 0.0 : scale * rng.normal();
    w.samples[k] = offset + slope * static_cast<double>(k) + noise;
  }
  return w;
}

std::vector<TrainingExample> random_tree_dataset(Rng& rng, std::size_t n,
                                                 std::size_t n_features) {
  std::vector<TrainingExample> data(n);
  for (TrainingExample& ex : data) {
    for (std::size_t f = 0; f < n_features; ++f) {
      ex.features[f] = rng.uniform01();
    }
    ex.label = rng.uniform01();
  }
  return data;
}

bool files_equal(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary);
  std::ifstream fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

bool run_cli(const std::string& args) {
  const std::string cmd = std::string(CLI_PATH) + " " + args + " >/dev/null";
  return std::system(cmd.c_str()) == 0;
}

std::optional<Dataset> g_dataset;
std::shared_ptr<const TreeEnsemble> g_model;
std::optional<ComparisonTable> g_table;

void criterion_1() {
  const auto t0 = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    DatasetParams p;
    g_dataset = build_dataset(p);
    const double secs = seconds_since(t0);
    const Dataset& d = *g_dataset;

    const std::vector<double> grid = noise_grid();
    std::size_t bad_label = 0;
    std::vector<std::size_t> per_level(grid.size(), 0);
    auto tally = [&](const std::vector<DatasetRow>& rows) {
      for (const DatasetRow& r : rows) {
        const auto it = std::find(grid.begin(), grid.end(), r.label);
        if (it == grid.end()) {
          ++bad_label;
        } else {
          ++per_level[static_cast<std::size_t>(it - grid.begin())];
        }
      }
    };
    tally(d.train);
    tally(d.test);
    const bool balanced =
        std::all_of(per_level.begin(), per_level.end(),
                    [](std::size_t c) { return c == 4800; });
    pass = d.train.size() == 57600 && d.test.size() == 14400 &&
           bad_label == 0 && balanced && secs < 120.0;
    detail = "(" + std::to_string(d.train.size()) + " train + " +
             std::to_string(d.test.size()) + " test rows, " +
             std::to_string(grid.size()) + " levels x 4800 rows)";
  } catch (const std::exception& e) {
    detail = std::string("(exception: ") + e.what() + ")";
  }
  report(1, "dataset regeneration matches the recipe", pass,
         seconds_since(t0), detail);
}

void criterion_2() {
  const auto t0 = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    Rng rng = Rng::stream(1001, 0);
    std::size_t mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
      const Window w = random_window(rng, i % 50 == 49);
      const FeatureVector impl = extract_features(w);
      const std::array<long double, 24> orac = oracle::features(w.samples);
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        if (!close_rel(impl[f], static_cast<double>(orac[f]), 1e-9)) {
          ++mismatches;
        }
      }
    }
    const double secs = seconds_since(t0);
    pass = mismatches == 0 && secs < 10.0;
    detail = "(1000 windows x 24 features, " + std::to_string(mismatches) +
             " mismatches beyond 1e-9 relative)";
  } catch (const std::exception& e) {
    detail = std::string("(exception: ") + e.what() + ")";
  }
  report(2, "feature extraction agrees with the reference implementation",
         pass, seconds_since(t0), detail);
}

void criterion_3() {
  const auto t0 = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    Rng rng = Rng::stream(1002, 0);
    std::size_t disagreements = 0;
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = 2 + rng.bounded(31);
      const std::size_t n_features = 1 + rng.bounded(3);
      const int min_leaf = 1 << rng.bounded(4);
      const std::vector<TrainingExample> data =
          random_tree_dataset(rng, n, n_features);
      const RegressionTree impl = fit_tree(data, min_leaf);
      const std::unique_ptr<oracle::TreeNode> orac =
          oracle::fit_tree(data, min_leaf);
      if (!oracle::same_tree(impl, 0, *orac)) ++disagreements;
    }
    const double secs = seconds_since(t0);
    pass = disagreements == 0 && secs < 30.0;
    detail = "(200 datasets, " + std::to_string(disagreements) +
             " trees differ from exhaustive search)";
  } catch (const std::exception& e) {
    detail = std::string("(exception: ") + e.what() + ")";
  }
  report(3, "greedy tree fitting equals exhaustive split search", pass,
         seconds_since(t0), detail);
}

void criterion_4() {
  const auto t0 = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    if (!g_dataset) throw std::runtime_error("criterion 1 dataset missing");
    const Dataset& d = *g_dataset;
    const std::vector<TrainingExample> train = to_examples(d.train);
    const std::vector<TrainingExample> test = to_examples(d.test);

    g_model = std::make_shared<const TreeEnsemble>(fit_ensemble(train, 30, 8, 0));
    const double ens_mse = evaluate_mse(*g_model, test);

    double mean = 0.0;
    for (const TrainingExample& ex : train) mean += ex.label;
    mean /= static_cast<double>(train.size());
    double base_mse = 0.0;
    for (const TrainingExample& ex : test) {
      base_mse += (ex.label - mean) * (ex.label - mean);
    }
    base_mse /= static_cast<double>(test.size());

    const SyntheticTruth clean =
        inverse_mechanize(make_straight_line(400.0), 100.0);
    const std::vector<double> grid = noise_grid();
    std::vector<double> rel_errors;
    std::vector<double> series(kWindowLength);
    for (std::size_t qi = 0; qi < grid.size(); ++qi) {
      Rng rng = Rng::stream(777, qi);
      const std::vector<ImuSample> noisy = corrupt(
          clean.imu, ProcessNoiseSpec::isotropic(grid[qi], grid[qi]), rng);
      const std::size_t n_windows = noisy.size() / kWindowLength;
      for (std::size_t ci = 0; ci < kImuChannels; ++ci) {
        const auto ch = static_cast<Channel>(ci);
        for (std::size_t w = 0; w < n_windows; ++w) {
          for (std::size_t k = 0; k < kWindowLength; ++k) {
            series[k] = channel_value(noisy[w * kWindowLength + k], ch);
          }
          const double q_hat =
              predict(*g_model, extract_features(Window{series, ch}));
          rel_errors.push_back(std::abs(q_hat - grid[qi]) / grid[qi]);
        }
      }
    }
    std::sort(rel_errors.begin(), rel_errors.end());
    const double median = rel_errors[rel_errors.size() / 2];

    const double secs = seconds_since(t0);
    pass = ens_mse <= 0.25 * base_mse && median <= 0.30 && secs < 600.0;
    detail = "(test mse " + fmt(ens_mse) + " vs mean-predictor " +
             fmt(base_mse) + ", fresh-window median relative error " +
             fmt(median) + ")";
  } catch (const std::exception& e) {
    detail = std::string("(exception: ") + e.what() + ")";
  }
  report(4, "ensemble beats the mean predictor and recovers the noise grid",
         pass, seconds_since(t0), detail);
}

void criterion_5() {
  const auto t0 = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    RunConfig cfg;
    const AnalyticTrajectory traj =
        trajectory_by_id(cfg.trajectory, cfg.duration);
    const EvalRun run = synthesize_eval_run(traj, cfg.imu_noise, cfg.dvl_var,
                                            cfg.dtau, cfg.rate_hz, 0);

    const auto t_run = Clock::now();
    const RunMetrics m = run_filter(run, ConstantQ{}, cfg);
    const double run_secs = seconds_since(t_run);

    // replay with explicit covariance checks at every DVL epoch
    const StrapdownParams params =
        StrapdownParams::at_latitude(run.truth.initial.lat);
    NavState nav = run.truth.initial;
    ErrorFilterState fscheck;
    fscheck.P = initial_covariance();
    const ProcessNoiseSpec q = ProcessNoiseSpec::isotropic(0.01, 0.001);
    double worst_asym = 0.0;
    double worst_eig = 0.0;
    std::size_t fix_i = 0;
    for (std::size_t i = 0; i < run.imu.size(); ++i) {
      ImuSample corrected = run.imu[i];
      corrected.f_b -= fscheck.b_a;
      corrected.w_ib -= fscheck.b_g;
      const NavState nav_next = mechanize(nav, corrected, 0.01, params);
      fscheck = propagate(fscheck, nav, corrected, q, 0.01);
      nav = nav_next;
      if (fix_i < run.dvl.size() && run.dvl[fix_i].after_sample == i) {
        DvlMeasurement meas;
        meas.v_meas = run.dvl[fix_i].v_meas;
        meas.R = run.R;
        const DvlUpdateResult res = dvl_update(fscheck, nav, meas);
        fscheck = res.fs;
        nav = res.nav;
        ++fix_i;
        worst_asym = std::max(
            worst_asym,
            (fscheck.P - fscheck.P.transpose()).cwiseAbs().maxCoeff());
        const Eigen::SelfAdjointEigenSolver<Matrix12d> eig(fscheck.P);
        worst_eig = std::min(worst_eig, eig.eigenvalues().minCoeff());
      }
    }

    RunConfig perfect = cfg;
    perfect.imu_noise = ProcessNoiseSpec::isotropic(0.0, 0.0, 0.0);
    perfect.dvl_var = 0.0;
    const EvalRun ideal = synthesize_eval_run(traj, perfect.imu_noise, 0.0,
                                              perfect.dtau, perfect.rate_hz, 0);
    const RunMetrics mp = run_filter(ideal, ConstantQ{}, perfect);

    pass = run_secs < 5.0 && m.psd_clamp_count == 0 && fix_i == 330 &&
           worst_asym < 1e-12 && worst_eig > -1e-9 && mp.srmse < 1e-6 &&
           mp.psd_clamp_count == 0;
    detail = "(run " + fmt(run_secs) + " s, srmse " + fmt(m.srmse) +
             ", max |P-P'| " + fmt(worst_asym) + ", min eig " +
             fmt(worst_eig) + ", perfect-sensor srmse " + fmt(mp.srmse) + ")";
  } catch (const std::exception& e) {
    detail = std::string("(exception: ") + e.what() + ")";
  }
  report(5, "full-length filter run stays fast, symmetric, and consistent",
         pass, seconds_since(t0), detail);
}

void criterion_6() {
  const auto t0 = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    if (!g_model) throw std::runtime_error("criterion 4 model missing");
    RunConfig cfg;
    cfg.runs = 20;
    cfg.seed = 0;
    const std::vector<QStrategy> strategies = {
        ConstantQ{ProcessNoiseSpec::isotropic(0.01, 0.001)},
        ConstantQ{ProcessNoiseSpec::isotropic(0.2, 0.02)},
        InnovationAdaptiveQ{1},
        InnovationAdaptiveQ{5},
        LearnedQ{g_model, cfg.tuning_rate},
    };
    g_table = monte_carlo(cfg, strategies);
    const std::vector<ComparisonRow>& rows = g_table->rows;
    const double tuned = rows[0].mean_srmse;
    const double mistuned = rows[1].mean_srmse;
    const double adaptive1 = rows[2].mean_srmse;
    const double adaptive5 = rows[3].mean_srmse;
    const double learned = rows[4].mean_srmse;

    const bool gate_a = mistuned > tuned;
    const bool gate_b = learned <= 0.95 * mistuned && learned <= 1.02 * tuned;
    const bool gate_c = adaptive5 <= adaptive1;
    const double secs = seconds_since(t0);
    pass = gate_a && gate_b && gate_c && secs < 900.0;
    detail = "(srmse means: tuned " + fmt(tuned) + ", 20x " + fmt(mistuned) +
             ", adaptive1 " + fmt(adaptive1) + ", adaptive5 " +
             fmt(adaptive5) + ", learned " + fmt(learned) + "; gates " +
             (gate_a ? "a+" : "a-") + (gate_b ? "b+" : "b-") +
             (gate_c ? "c+" : "c-") + ")";
  } catch (const std::exception& e) {
    detail = std::string("(exception: ") + e.what() + ")";
  }
  report(6, "monte-carlo ranking of the adaptation strategies", pass,
         seconds_since(t0), detail);
}

void criterion_7() {
  const auto t0 = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    const std::vector<Eigen::Vector3d> single = {Eigen::Vector3d(3, 4, 0)};
    const std::vector<Eigen::Vector3d> two = {Eigen::Vector3d(1, 0, 0),
                                              Eigen::Vector3d(0, 1, 0)};
    const bool identities = close_rel(srmse(single), 5.0, 1e-12) &&
                            close_rel(smae(single), 7.0, 1e-12) &&
                            close_rel(srmse(two), 1.0, 1e-12) &&
                            close_rel(smae(two), 1.0, 1e-12);

    if (!g_table) throw std::runtime_error("criterion 6 table missing");
    std::size_t violations = 0;
    std::size_t runs_checked = 0;
    for (const ComparisonRow& row : g_table->rows) {
      for (std::size_t r = 0; r < row.srmse_runs.size(); ++r) {
        ++runs_checked;
        if (row.smae_runs[r] > std::sqrt(3.0) * row.srmse_runs[r] + 1e-12) {
          ++violations;
        }
      }
    }
    pass = identities && violations == 0 && runs_checked == 100;
    detail = "(identities " + std::string(identities ? "ok" : "broken") +
             ", " + std::to_string(runs_checked) + " runs, " +
             std::to_string(violations) + " smae bound violations)";
  } catch (const std::exception& e) {
    detail = std::string("(exception: ") + e.what() + ")";
  }
  report(7, "error metrics obey their definitions and mutual bound", pass,
         seconds_since(t0), detail);
}

void criterion_8() {
  const auto t0 = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    const fs::path root = "acceptance_rerun";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string r = root.string();

    bool ok = true;
    auto step = [&](const std::string& args) {
      if (ok && !run_cli(args)) ok = false;
    };

    const std::string gen_flags = " --seed 5 --duration 40 --levels 3";
    step("generate --out " + r + "/g1" + gen_flags);
    step("generate --out " + r + "/g2" + gen_flags);

    const std::string train_flags =
        " --data " + r + "/g1/train.csv --test " + r + "/g1/test.csv" +
        " --trees 8 --seed 3";
    step("train --out " + r + "/m1.json" + train_flags);
    step("train --out " + r + "/m2.json" + train_flags);

    const std::string eval_flags =
        " --runs 2 --duration 60 --seed 4 --strategy constant:0.01,0.001"
        " --strategy adaptive:5 --model " + r + "/m1.json";
    step("evaluate --out " + r + "/e1" + eval_flags);
    step("evaluate --out " + r + "/e2" + eval_flags);

    const std::string run_flags =
        " --strategy adaptive:5 --duration 60 --seed 9";
    step("run --out " + r + "/r1.csv" + run_flags);
    step("run --out " + r + "/r2.csv" + run_flags);

    std::size_t mismatched = 0;
    if (ok) {
      const std::vector<std::pair<fs::path, fs::path>> pairs = {
          {root / "g1/train.csv", root / "g2/train.csv"},
          {root / "g1/test.csv", root / "g2/test.csv"},
          {root / "m1.json", root / "m2.json"},
          {root / "e1/report.txt", root / "e2/report.txt"},
          {root / "e1/report.csv", root / "e2/report.csv"},
          {root / "r1.csv", root / "r2.csv"},
      };
      for (const auto& [a, b] : pairs) {
        if (!files_equal(a, b)) ++mismatched;
      }
      pass = mismatched == 0;
    }
    detail = ok ? "(6 file pairs compared, " + std::to_string(mismatched) +
                      " differ)"
                : "(a CLI invocation failed)";
    fs::remove_all(root);
  } catch (const std::exception& e) {
    detail = std::string("(exception: ") + e.what() + ")";
  }
  report(8, "repeated CLI invocations reproduce byte-identical artifacts",
         pass, seconds_since(t0), detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (g_failures > 0) {
    std::printf("%d of 8 criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all 8 criteria passed\n");
  return 0;
}
