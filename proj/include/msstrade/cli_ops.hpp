#pragma once

#include <string>
#include <vector>

#include "msstrade/config.hpp"

namespace mss {

inline constexpr const char* kVersion = "0.1.0";

// Writes the configured synthetic series as a bar CSV; returns the path.
std::string cmd_synth(const RunConfig& cfg, const std::string& out_path);

// Per requested scale, resamples the raw series, runs the stroke pipeline,
// and writes shapes_<scale>.csv / strokes_<scale>.csv under out_dir.
// Returns the written paths.
std::vector<std::string> cmd_extract(const BarSeries& raw,
                                     const std::vector<TimeScale>& scales,
                                     TrendDirection initial, const std::string& out_dir);

std::string shapes_csv(const std::vector<Shape>& shapes);
std::string strokes_csv(const std::vector<Stroke>& strokes);

struct TrainArtifacts {
  std::string manifest_path;
  std::vector<std::string> checkpoint_paths;  // empty for rule-based agents
  std::vector<std::string> log_paths;
  double wall_clock_seconds = 0;
};

// Trains cfg.agent.kind once per seed on the train split and writes
// checkpoints, per-seed logs, and an atomically-replaced manifest.json.
TrainArtifacts cmd_train(const RunConfig& cfg);

struct BacktestArtifacts {
  std::string report_path;
  std::vector<std::string> equity_paths;
  std::string plot_path;
  std::vector<BacktestReport> reports;
};

// Evaluates buy-and-hold, turtle, and (when cfg.agent.kind is a learning
// agent) the checkpointed policy per seed over the test span. Missing
// checkpoints raise CheckpointError.
BacktestArtifacts cmd_backtest(const RunConfig& cfg, const std::string& checkpoint_dir);

// Baseline agents observe the raw window only; MSSDDPG adds stroke layers.
PipelineConfig effective_pipeline(const RunConfig& cfg);

std::string checkpoint_path(const std::string& dir, AgentKind kind, std::uint64_t seed);

// Self-contained SVG overlay of normalized equity curves.
std::string equity_plot_svg(const std::vector<std::string>& names,
                            const std::vector<EquityCurve>& curves);

void write_text_file(const std::string& path, const std::string& content);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace mss
