#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msstrade/cli_ops.hpp"
#include "msstrade/errors.hpp"

namespace {

std::vector<mss::TimeScale> parse_scales_list(const std::string& csv) {
  std::vector<mss::TimeScale> scales;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) scales.push_back(mss::TimeScale::parse(item));
  }
  if (scales.empty()) throw mss::ConfigError("--scales list is empty");
  return scales;
}

mss::BarSeries load_input_series(const mss::RunConfig& cfg) {
  if (cfg.data.source == "csv") {
    return mss::load_csv(cfg.data.csv_path, cfg.pipeline.raw_scale);
  }
  mss::SynthSpec spec = cfg.data.synth;
  spec.scale = cfg.pipeline.raw_scale;
  return mss::synth_series(spec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-scale stroke trading pipeline"};
  app.set_version_flag("--version", mss::kVersion);
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string scales_csv;
  std::vector<std::uint64_t> seeds;
  double fee = -1.0;
  app.add_option("--config", config_path, "run configuration JSON");
  app.add_option("--seed", seeds, "override config seeds (repeatable)");
  app.add_option("--out", out_dir, "override output directory");
  app.add_option("--fee", fee, "override per-side fee rate");
  app.add_option("--scales", scales_csv, "comma-separated stroke scales, e.g. day,week,month");

  CLI::App* c_extract =
      app.add_subcommand("extract", "write per-scale shape/stroke annotations");
  CLI::App* c_train = app.add_subcommand("train", "train the configured agent per seed");
  CLI::App* c_backtest =
      app.add_subcommand("backtest", "evaluate baselines and checkpoints on the test span");
  CLI::App* c_synth = app.add_subcommand("synth", "write the configured synthetic series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    mss::RunConfig cfg = config_path.empty() ? mss::RunConfig{} : mss::load_config(config_path);
    if (!seeds.empty()) cfg.run.seeds = seeds;
    if (!out_dir.empty()) cfg.run.out_dir = out_dir;
    if (fee >= 0) cfg.env.fee_rate = fee;
    if (!scales_csv.empty()) cfg.pipeline.stroke_scales = parse_scales_list(scales_csv);
    mss::validate_config(cfg);

    if (c_extract->parsed()) {
      const mss::BarSeries raw = load_input_series(cfg);
      std::vector<mss::TimeScale> scales = cfg.pipeline.stroke_scales;
      if (scales.empty()) scales.push_back(cfg.pipeline.raw_scale);
      const auto files = mss::cmd_extract(raw, scales, cfg.pipeline.initial_merge_direction,
                                          cfg.run.out_dir);
      for (const std::string& f : files) std::cout << "wrote " << f << "\n";
    } else if (c_train->parsed()) {
      const mss::TrainArtifacts art = mss::cmd_train(cfg);
      for (const std::string& f : art.checkpoint_paths) std::cout << "wrote " << f << "\n";
      for (const std::string& f : art.log_paths) std::cout << "wrote " << f << "\n";
      std::cout << "wrote " << art.manifest_path << "\n";
      std::printf("trained %s on %zu seed(s) in %.1fs\n",
                  mss::agent_kind_name(cfg.agent.kind).c_str(), cfg.run.seeds.size(),
                  art.wall_clock_seconds);
    } else if (c_backtest->parsed()) {
      const mss::BacktestArtifacts art = mss::cmd_backtest(cfg, cfg.run.out_dir);
      for (const std::string& f : art.equity_paths) std::cout << "wrote " << f << "\n";
      std::cout << "wrote " << art.plot_path << "\n";
      std::cout << "wrote " << art.report_path << "\n";
      for (const mss::BacktestReport& r : art.reports) {
        std::printf("%-14s cumulative %+.2f%%  drawdown %.2f%%\n", r.strategy.c_str(),
                    100.0 * r.cumulative, 100.0 * r.drawdown);
      }
    } else if (c_synth->parsed()) {
      const std::string path = mss::cmd_synth(cfg, cfg.run.out_dir + "/synth.csv");
      std::cout << "wrote " << path << "\n";
    }
  } catch (const mss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
