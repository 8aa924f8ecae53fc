#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "auvnav/datagen.hpp"
#include "auvnav/ensemble.hpp"
#include "auvnav/harness.hpp"
#include "auvnav/qadapt.hpp"
#include "auvnav/textio.hpp"

namespace {

using namespace auvnav;

int cmd_generate(const DatasetParams& p, const std::string& out_dir) {
  const Dataset ds = build_dataset(p);
  std::filesystem::create_directories(out_dir);
  const std::string train_path = out_dir + "/train.csv";
  const std::string test_path = out_dir + "/test.csv";
  write_dataset_csv(ds.train, p, train_path);
  write_dataset_csv(ds.test, p, test_path);
  std::printf("train_rows %zu\n", ds.train.size());
  std::printf("test_rows %zu\n", ds.test.size());
  std::printf("wrote %s\n", train_path.c_str());
  std::printf("wrote %s\n", test_path.c_str());
  return 0;
}

int cmd_train(const std::string& data_path, const std::string& test_path,
              const std::string& out_path, int trees, int min_leaf,
              std::uint64_t seed, std::size_t window) {
  const std::vector<TrainingExample> train =
      to_examples(read_dataset_csv(data_path));
  TreeEnsemble ens = fit_ensemble(train, trees, min_leaf, seed);
  ens.window_length = window;
  std::printf("train_rows %zu\n", train.size());
  std::printf("trees %zu\n", ens.trees.size());
  if (!test_path.empty()) {
    const std::vector<TrainingExample> test =
        to_examples(read_dataset_csv(test_path));
    std::printf("test_rows %zu\n", test.size());
    std::printf("test_mse %s\n", format_double(evaluate_mse(ens, test)).c_str());
  }
  save_ensemble(ens, out_path);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

std::vector<QStrategy> build_strategies(const std::vector<std::string>& texts,
                                        const std::string& model_path,
                                        const RunConfig& cfg) {
  std::vector<std::string> all = texts;
  if (all.empty()) {
    all = {"constant:0.01,0.001", "constant:0.2,0.02", "adaptive:1",
           "adaptive:5"};
    if (!model_path.empty()) all.push_back("learned:" + model_path);
  }
  std::vector<QStrategy> out;
  for (const std::string& t : all) {
    QStrategy s = parse_strategy(t);
    if (auto* l = std::get_if<LearnedQ>(&s)) l->tuning_rate = cfg.tuning_rate;
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_evaluate(const RunConfig& cfg, const std::vector<std::string>& texts,
                 const std::string& model_path, const std::string& out_dir) {
  const std::vector<QStrategy> strategies =
      build_strategies(texts, model_path, cfg);
  const ComparisonTable table = monte_carlo(cfg, strategies);
  const std::string report = render_report(table);
  std::fputs(report.c_str(), stdout);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    const std::string txt_path = out_dir + "/report.txt";
    std::ofstream txt(txt_path);
    if (!txt) throw std::runtime_error("cannot open " + txt_path);
    txt << report;
    write_report_csv(table, out_dir + "/report.csv");
    std::printf("wrote %s\n", txt_path.c_str());
    std::printf("wrote %s/report.csv\n", out_dir.c_str());
  }
  return 0;
}

int cmd_run(const RunConfig& cfg, const std::string& strategy_text,
            const std::string& out_path) {
  QStrategy strategy = parse_strategy(strategy_text);
  if (auto* l = std::get_if<LearnedQ>(&strategy)) {
    l->tuning_rate = cfg.tuning_rate;
  }
  const AnalyticTrajectory traj =
      trajectory_by_id(cfg.trajectory, cfg.duration);
  const std::uint64_t run_seed = Rng::stream(cfg.seed, 0).next_u64();
  const EvalRun run = synthesize_eval_run(traj, cfg.imu_noise, cfg.dvl_var,
                                          cfg.dtau, cfg.rate_hz, run_seed);
  const RunMetrics m = run_filter(run, strategy, cfg);

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << "# format_version 1\n";
    out << "# strategy " << strategy_name(strategy) << "\n";
    out << "t,verr_n,verr_e,verr_d,innov_n,innov_e,innov_d,q_sum\n";
    for (std::size_t k = 0; k < m.epoch_t.size(); ++k) {
      out << format_double(m.epoch_t[k]);
      for (int i = 0; i < 3; ++i) {
        out << ',' << format_double(m.velocity_error[k][i]);
      }
      for (int i = 0; i < 3; ++i) {
        out << ',' << format_double(m.innovation[k][i]);
      }
      out << ',' << format_double(m.q_sum[k]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + out_path);
  }

  std::printf("strategy %s\n", strategy_name(strategy).c_str());
  std::printf("epochs %zu\n", m.epoch_t.size());
  std::printf("srmse %s\n", format_double(m.srmse).c_str());
  std::printf("smae %s\n", format_double(m.smae).c_str());
  std::printf("psd_clamps %ld\n", m.psd_clamp_count);
  if (!out_path.empty()) std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Velocity-aided inertial navigation with tree-tuned process "
               "noise"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand(
      "generate", "Synthesize the windowed feature dataset");
  DatasetParams dp;
  std::string gen_out = "data";
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--seed", dp.seed, "rng seed");
  gen->add_option("--rate", dp.rate_hz, "IMU rate [Hz]");
  gen->add_option("--duration", dp.duration, "record length [s]");
  gen->add_option("--window", dp.window, "samples per window");
  gen->add_option("--levels", dp.noise_levels, "noise grid size");
  gen->add_option("--noise-lo", dp.noise_lo, "lowest injected variance");
  gen->add_option("--noise-hi", dp.noise_hi, "highest injected variance");
  gen->add_option("--test-fraction", dp.test_fraction, "held-out share");

  auto* train = app.add_subcommand("train", "Fit the bagged regression trees");
  std::string train_data;
  std::string train_test;
  std::string train_out = "model.json";
  int train_trees = 30;
  int train_min_leaf = 8;
  std::uint64_t train_seed = 0;
  std::size_t train_window = kWindowLength;
  train->add_option("--data", train_data, "training csv")->required();
  train->add_option("--test", train_test, "held-out csv for the mse report");
  train->add_option("--out", train_out, "model output path");
  train->add_option("--trees", train_trees, "ensemble size");
  train->add_option("--min-leaf", train_min_leaf, "minimum examples per leaf");
  train->add_option("--seed", train_seed, "bootstrap seed");
  train->add_option("--window", train_window,
                    "window length the model expects at prediction time");

  auto* ev = app.add_subcommand(
      "evaluate", "Monte-Carlo strategy comparison on a held-out trajectory");
  auto* runc = app.add_subcommand(
      "run", "Single filter run with per-epoch series output");

  std::string config_path;
  RunConfig cfg;
  std::vector<std::string> strategy_texts;
  std::string model_path;
  std::string eval_out;
  std::string run_out = "series.csv";
  std::string run_strategy = "constant:0.01,0.001";

  for (CLI::App* sub : {ev, runc}) {
    sub->add_option("--config", config_path, "run config json");
    sub->add_option("--trajectory", cfg.trajectory, "trajectory id");
    sub->add_option("--duration", cfg.duration, "run length [s]");
    sub->add_option("--rate", cfg.rate_hz, "IMU rate [Hz]");
    sub->add_option("--dvl-interval", cfg.dtau, "seconds between DVL fixes");
    sub->add_option("--tuning-rate", cfg.tuning_rate,
                    "seconds between learned Q refreshes");
    sub->add_option("--dvl-var", cfg.dvl_var, "DVL noise variance");
    sub->add_option("--seed", cfg.seed, "master seed");
  }
  ev->add_option("--runs", cfg.runs, "Monte-Carlo repetitions");
  ev->add_option("--strategy", strategy_texts,
                 "strategy spec, repeatable (constant:qf,qw | adaptive:n | "
                 "learned:model.json)");
  ev->add_option("--model", model_path,
                 "model to append as a learned strategy when --strategy is "
                 "not given");
  ev->add_option("--out", eval_out, "report output directory");
  runc->add_option("--strategy", run_strategy, "strategy spec");
  runc->add_option("--out", run_out, "per-epoch series csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(dp, gen_out);
    if (train->parsed()) {
      return cmd_train(train_data, train_test, train_out, train_trees,
                       train_min_leaf, train_seed, train_window);
    }

    CLI::App* sub = ev->parsed() ? ev : runc;
    if (!config_path.empty()) {
      RunConfig loaded = load_run_config(config_path);
      if (!sub->count("--trajectory")) cfg.trajectory = loaded.trajectory;
      if (!sub->count("--duration")) cfg.duration = loaded.duration;
      if (!sub->count("--rate")) cfg.rate_hz = loaded.rate_hz;
      if (!sub->count("--dvl-interval")) cfg.dtau = loaded.dtau;
      if (!sub->count("--tuning-rate")) cfg.tuning_rate = loaded.tuning_rate;
      if (!sub->count("--dvl-var")) cfg.dvl_var = loaded.dvl_var;
      if (!sub->count("--seed")) cfg.seed = loaded.seed;
      if (!(sub == ev && ev->count("--runs"))) cfg.runs = loaded.runs;
      cfg.imu_noise = loaded.imu_noise;
      cfg.initial_q = loaded.initial_q;
    }
    validate_config(cfg);

    if (ev->parsed()) {
      return cmd_evaluate(cfg, strategy_texts, model_path, eval_out);
    }
    return cmd_run(cfg, run_strategy, run_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
