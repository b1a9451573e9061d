#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msstrade/agents.hpp"
#include "msstrade/bars.hpp"
#include "msstrade/env.hpp"
#include "msstrade/features.hpp"
#include "msstrade/metrics.hpp"

namespace mss {

// Range endpoints are either bar indices ("3000") or dates ("2014-01-01");
// both resolve to half-open index ranges [begin, end) against a series.
struct DataConfig {
  static SynthSpec default_synth() {
    SynthSpec s;
    s.length = 4000;
    return s;
  }

  std::string source = "synth";  // "synth" | "csv"
  std::string csv_path;
  SynthSpec synth = default_synth();
  std::string train_begin = "0";
  std::string train_end = "3000";
  std::string test_begin = "3000";
  std::string test_end = "4000";
};

struct AgentConfig {
  AgentKind kind = AgentKind::MssDdpg;
  DdpgHyper ddpg;
  DqnHyper dqn;
  TrainSchedule schedule;
};

struct RunSection {
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";
};

struct RunConfig {
  DataConfig data;
  PipelineConfig pipeline;
  EnvConfig env;
  AgentConfig agent;
  MetricsConfig metrics;
  RunSection run;
};

// Throws ConfigError on malformed or out-of-domain fields.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);  // ConfigError on unreadable file

// Canonical serialization: every field, defaults included, sorted keys.
// parse(serialize(c)) == c, and the bytes feed config_hash.
std::string serialize_config(const RunConfig& cfg);

// FNV-1a of the canonical serialization, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

// Static invariants: ranges well-formed, train strictly precedes test.
void validate_config(const RunConfig& cfg);

struct DataBundle {
  BarSeries series;
  std::size_t train_begin = 0;  // inclusive
  std::size_t train_end = 0;    // exclusive
  std::size_t test_begin = 0;
  std::size_t test_end = 0;
};

// Loads/synthesizes the series and resolves ranges to indices.
// Empty resolved spans raise DataError.
DataBundle build_bundle(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace mss
