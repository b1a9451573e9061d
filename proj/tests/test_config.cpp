#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "msstrade/config.hpp"
#include "msstrade/errors.hpp"
#include "msstrade/timeutil.hpp"

using namespace mss;

namespace {

RunConfig parsed(const std::string& text) { return parse_config(text); }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

// ---------------------------------------------------------------------------
// parsing and round trips
// ---------------------------------------------------------------------------

TEST_CASE("an empty object yields the default configuration") {
  const RunConfig cfg = parsed("{}");
  CHECK(cfg == RunConfig{});
  CHECK(cfg.data.source == "synth");
  CHECK(cfg.data.synth.length == 4000);
  CHECK(cfg.data.train_end == "3000");
  CHECK(cfg.pipeline.window_length == 30);
  CHECK(cfg.pipeline.stroke_scales.size() == 3);
  CHECK(cfg.agent.kind == AgentKind::MssDdpg);
  CHECK(cfg.run.seeds == std::vector<std::uint64_t>{1});
}

TEST_CASE("parse picks up scattered overrides") {
  const RunConfig cfg = parsed(R"({
    "data": {"train_begin": "0", "train_end": "100",
             "test_begin": "100", "test_end": "150",
             "synth": {"kind": "sine", "length": 150, "period": 25.0}},
    "pipeline": {"stroke_scales": ["day", "week"], "window_length": 12,
                 "normalization": "none", "initial_direction": "descending"},
    "env": {"fee_rate": 0.002, "initial_cash": 500000.0},
    "agent": {"kind": "dqn",
              "dqn": {"epsilon": 0.25, "hidden": [16, 8]},
              "ddpg": {"tau": 0.01, "actor_hidden": [32]},
              "schedule": {"episodes": 5, "episode_length": 40}},
    "metrics": {"rf_annual": 0.02, "periods_per_year": 252.0},
    "run": {"seeds": [5, 6, 7], "out_dir": "results"}
  })");

  CHECK(cfg.data.synth.kind == SynthSpec::Kind::Sine);
  CHECK(cfg.data.synth.length == 150);
  CHECK(cfg.data.synth.period == 25.0);
  CHECK(cfg.pipeline.stroke_scales.size() == 2);
  CHECK(cfg.pipeline.stroke_scales[1] == TimeScale::week());
  CHECK(cfg.pipeline.window_length == 12);
  CHECK(cfg.pipeline.normalization == Normalization::None);
  CHECK(cfg.pipeline.initial_merge_direction == TrendDirection::Descending);
  CHECK(cfg.env.fee_rate == 0.002);
  CHECK(cfg.env.initial_cash == 500000.0);
  CHECK(cfg.agent.kind == AgentKind::Dqn);
  CHECK(cfg.agent.dqn.epsilon == 0.25);
  CHECK(cfg.agent.dqn.hidden == std::vector<std::size_t>{16, 8});
  CHECK(cfg.agent.ddpg.tau == 0.01);
  CHECK(cfg.agent.ddpg.actor_hidden == std::vector<std::size_t>{32});
  CHECK(cfg.agent.schedule.episodes == 5);
  CHECK(cfg.metrics.rf_annual == 0.02);
  CHECK(cfg.run.seeds == std::vector<std::uint64_t>{5, 6, 7});
  CHECK(cfg.run.out_dir == "results");
}

TEST_CASE("serialize then parse is the identity") {
  RunConfig cfg;
  cfg.agent.kind = AgentKind::Turtle;
  cfg.env.fee_rate = 0.0005;
  cfg.pipeline.stroke_scales = {TimeScale::week(), TimeScale::month()};
  cfg.run.seeds = {3, 9};
  cfg.data.synth.kind = SynthSpec::Kind::Sine;

  const std::string text = serialize_config(cfg);
  const RunConfig again = parse_config(text);
  CHECK(again == cfg);
  CHECK(serialize_config(again) == text);  // canonical form is a fixed point
}

TEST_CASE("load_config reads a file and rejects a missing one") {
  const auto path = temp_file("msstrade_cfg.json");
  {
    std::ofstream out(path);
    out << R"({"run": {"out_dir": "elsewhere"}})";
  }
  CHECK(load_config(path.string()).run.out_dir == "elsewhere");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path.string()), ConfigError);
}

// ---------------------------------------------------------------------------
// rejection cases
// ---------------------------------------------------------------------------

TEST_CASE("malformed documents and fields raise ConfigError") {
  CHECK_THROWS_AS(parsed("not json at all"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"data": {"source": "database"}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"data": {"source": "csv"}})"), ConfigError);  // path missing
  CHECK_THROWS_AS(parsed(R"({"data": {"synth": {"kind": "sawtooth"}}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"pipeline": {"raw_scale": "fortnight"}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"pipeline": {"window_length": 0}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"pipeline": {"normalization": "meanvar"}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"pipeline": {"initial_direction": "up"}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"pipeline": {"stroke_scales": ["week", "day"]}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"env": {"fee_rate": -0.001}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"env": {"initial_cash": 0}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"agent": {"kind": "momentum"}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"agent": {"ddpg": {"gamma": 1.0}}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"agent": {"ddpg": {"tau": 0.0}}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"agent": {"dqn": {"epsilon": 1.5}}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"agent": {"dqn": {"hidden": ["wide"]}}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"agent": {"schedule": {"episode_length": 0}}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"metrics": {"periods_per_year": 0}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"run": {"seeds": []}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"run": {"seeds": ["one"]}})"), ConfigError);
  CHECK_THROWS_AS(parsed(R"({"env": {"fee_rate": "cheap"}})"), ConfigError);
}

TEST_CASE("train must strictly precede the test range") {
  auto ranges = [](const char* tb, const char* te, const char* sb, const char* se) {
    return std::string(R"({"data": {"train_begin": ")") + tb + R"(", "train_end": ")" + te +
           R"(", "test_begin": ")" + sb + R"(", "test_end": ")" + se + R"("}})";
  };
  CHECK_THROWS_AS(parsed(ranges("0", "3000", "2500", "4000")), ConfigError);  // overlap
  CHECK_THROWS_AS(parsed(ranges("3000", "1000", "3000", "4000")), ConfigError);  // inverted
  CHECK_THROWS_AS(parsed(ranges("0", "3000", "4000", "3500")), ConfigError);
  CHECK_THROWS_AS(parsed(ranges("5", "5", "6", "7")), ConfigError);  // empty train
  CHECK_THROWS_AS(parsed(ranges("0", "10", "10", "10")), ConfigError);  // empty test
  CHECK_NOTHROW(parsed(ranges("0", "3000", "3000", "4000")));  // touching is fine

  // dates work, mixing indices and dates does not
  CHECK_NOTHROW(parsed(ranges("2000-01-03", "2000-03-01", "2000-03-01", "2000-06-01")));
  CHECK_THROWS_AS(parsed(ranges("0", "3000", "2014-01-01", "2015-01-01")), ConfigError);
  CHECK_THROWS_AS(parsed(ranges("0", "2000-03-01", "3000", "4000")), ConfigError);
  CHECK_THROWS_AS(parsed(ranges("2000-01-03", "2000-02-01", "2000-02-30", "2000-03-01")),
                  ConfigError);  // impossible date
  CHECK_THROWS_AS(parsed(ranges("12a", "3000", "3000", "4000")), ConfigError);
}

// ---------------------------------------------------------------------------
// hashing
// ---------------------------------------------------------------------------

TEST_CASE("config hash is 16 hex chars, stable, and field-sensitive") {
  const RunConfig a;
  const std::string ha = config_hash(a);
  CHECK(ha.size() == 16);
  CHECK(ha.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(config_hash(a) == ha);

  RunConfig b;
  b.run.seeds = {2};
  CHECK(config_hash(b) != ha);
  RunConfig c;
  c.env.fee_rate = 0.0011;
  CHECK(config_hash(c) != ha);

  // pinned FNV-1a over the canonical bytes
  const std::string text = serialize_config(a);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  CHECK(ha == buf);
}

// ---------------------------------------------------------------------------
// bundles
// ---------------------------------------------------------------------------

TEST_CASE("synth bundles resolve index ranges against the generated series") {
  RunConfig cfg;
  cfg.data.synth.length = 200;
  cfg.data.train_begin = "0";
  cfg.data.train_end = "150";
  cfg.data.test_begin = "150";
  cfg.data.test_end = "99999";  // clamps to the series length
  validate_config(cfg);

  const DataBundle b = build_bundle(cfg);
  CHECK(b.series.size() == 200);
  CHECK(b.series.scale == cfg.pipeline.raw_scale);
  CHECK(b.train_begin == 0);
  CHECK(b.train_end == 150);
  CHECK(b.test_begin == 150);
  CHECK(b.test_end == 200);
}

TEST_CASE("date endpoints resolve to the first bar at or after the date") {
  RunConfig cfg;
  cfg.data.synth.length = 60;  // daily from 2000-01-03
  cfg.data.train_begin = "2000-01-03";
  cfg.data.train_end = "2000-01-10";
  cfg.data.test_begin = "2000-01-10";
  cfg.data.test_end = "2000-01-20";
  validate_config(cfg);

  const DataBundle b = build_bundle(cfg);
  CHECK(b.train_begin == 0);
  CHECK(b.train_end == 7);
  CHECK(b.test_begin == 7);
  CHECK(b.test_end == 17);
}

TEST_CASE("ranges that resolve to nothing raise DataError") {
  RunConfig cfg;
  cfg.data.synth.length = 40;
  cfg.data.train_begin = "0";
  cfg.data.train_end = "30";
  cfg.data.test_begin = "50";  // past the end of the series
  cfg.data.test_end = "60";
  validate_config(cfg);
  CHECK_THROWS_AS(build_bundle(cfg), DataError);
}

TEST_CASE("csv bundles load through the configured path") {
  const auto path = temp_file("msstrade_cfg_bars.csv");
  {
    std::ofstream out(path);
    out << "timestamp,open,high,low,close,volume\n";
    for (int i = 0; i < 30; ++i) {
      out << format_timestamp(946857600LL + 86400LL * i) << ',' << 10.0 + i << ',' << 11.5 + i
          << ',' << 9.5 + i << ',' << 11.0 + i << ",100\n";
    }
  }
  RunConfig cfg;
  cfg.data.source = "csv";
  cfg.data.csv_path = path.string();
  cfg.data.train_begin = "0";
  cfg.data.train_end = "20";
  cfg.data.test_begin = "20";
  cfg.data.test_end = "30";
  validate_config(cfg);

  const DataBundle b = build_bundle(cfg);
  CHECK(b.series.size() == 30);
  CHECK(b.series.bars[0].close == 11.0);
  CHECK(b.test_end == 30);
  std::filesystem::remove(path);
}
