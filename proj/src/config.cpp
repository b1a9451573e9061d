#include "msstrade/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "msstrade/errors.hpp"
#include "msstrade/timeutil.hpp"

namespace mss {

namespace {

using json = nlohmann::json;

std::string synth_kind_name(SynthSpec::Kind k) {
  switch (k) {
    case SynthSpec::Kind::Sine: return "sine";
    case SynthSpec::Kind::Trend: return "trend";
    case SynthSpec::Kind::RandomWalk: return "walk";
  }
  return "?";
}

SynthSpec::Kind parse_synth_kind(const std::string& s) {
  if (s == "sine") return SynthSpec::Kind::Sine;
  if (s == "trend") return SynthSpec::Kind::Trend;
  if (s == "walk") return SynthSpec::Kind::RandomWalk;
  throw ConfigError("unknown synth kind '" + s + "'");
}

TimeScale parse_scale_cfg(const std::string& s) {
  try {
    return TimeScale::parse(s);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "': " + e.what());
  }
}

json synth_to_json(const SynthSpec& s) {
  return json{{"kind", synth_kind_name(s.kind)},
              {"length", s.length},
              {"seed", s.seed},
              {"offset", s.offset},
              {"amplitude", s.amplitude},
              {"period", s.period},
              {"slope", s.slope},
              {"sigma", s.sigma},
              {"drift", s.drift},
              {"range_frac", s.range_frac},
              {"base_volume", s.base_volume},
              {"start_ts", s.start_ts},
              {"step_seconds", s.step_seconds},
              {"scale", s.scale.name()}};
}

SynthSpec synth_from_json(const json& j) {
  SynthSpec s;
  s.kind = parse_synth_kind(get_or<std::string>(j, "kind", synth_kind_name(s.kind)));
  s.length = get_or<std::size_t>(j, "length", s.length);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  s.offset = get_or<double>(j, "offset", s.offset);
  s.amplitude = get_or<double>(j, "amplitude", s.amplitude);
  s.period = get_or<double>(j, "period", s.period);
  s.slope = get_or<double>(j, "slope", s.slope);
  s.sigma = get_or<double>(j, "sigma", s.sigma);
  s.drift = get_or<double>(j, "drift", s.drift);
  s.range_frac = get_or<double>(j, "range_frac", s.range_frac);
  s.base_volume = get_or<double>(j, "base_volume", s.base_volume);
  s.start_ts = get_or<std::int64_t>(j, "start_ts", s.start_ts);
  s.step_seconds = get_or<std::int64_t>(j, "step_seconds", s.step_seconds);
  s.scale = parse_scale_cfg(get_or<std::string>(j, "scale", s.scale.name()));
  return s;
}

json hidden_to_json(const std::vector<std::size_t>& h) { return json(h); }

std::vector<std::size_t> hidden_from_json(const json& j, std::vector<std::size_t> fallback) {
  if (j.is_null()) return fallback;
  try {
    return j.get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad hidden-layer list: ") + e.what());
  }
}

bool is_index_endpoint(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

// index endpoints compare as counts, date endpoints as timestamps
std::int64_t endpoint_order_key(const std::string& s) {
  if (is_index_endpoint(s)) return std::stoll(s);
  try {
    return parse_timestamp(s);
  } catch (const Error& e) {
    throw ConfigError(std::string("bad range endpoint '") + s + "': " + e.what());
  }
}

std::size_t resolve_endpoint(const BarSeries& series, const std::string& s) {
  if (is_index_endpoint(s)) {
    return std::min<std::size_t>(std::stoull(s), series.size());
  }
  const std::int64_t ts = endpoint_order_key(s);
  std::size_t i = 0;
  while (i < series.size() && series.bars[i].timestamp < ts) ++i;
  return i;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;

  if (j.contains("data")) {
    const json& d = j["data"];
    cfg.data.source = get_or<std::string>(d, "source", cfg.data.source);
    if (cfg.data.source != "synth" && cfg.data.source != "csv") {
      throw ConfigError("data.source must be 'synth' or 'csv'");
    }
    cfg.data.csv_path = get_or<std::string>(d, "csv_path", cfg.data.csv_path);
    if (d.contains("synth")) cfg.data.synth = synth_from_json(d["synth"]);
    cfg.data.train_begin = get_or<std::string>(d, "train_begin", cfg.data.train_begin);
    cfg.data.train_end = get_or<std::string>(d, "train_end", cfg.data.train_end);
    cfg.data.test_begin = get_or<std::string>(d, "test_begin", cfg.data.test_begin);
    cfg.data.test_end = get_or<std::string>(d, "test_end", cfg.data.test_end);
  }

  if (j.contains("pipeline")) {
    const json& p = j["pipeline"];
    cfg.pipeline.raw_scale =
        parse_scale_cfg(get_or<std::string>(p, "raw_scale", cfg.pipeline.raw_scale.name()));
    if (p.contains("stroke_scales")) {
      cfg.pipeline.stroke_scales.clear();
      for (const json& s : p["stroke_scales"]) {
        cfg.pipeline.stroke_scales.push_back(parse_scale_cfg(s.get<std::string>()));
      }
    }
    cfg.pipeline.window_length =
        get_or<std::size_t>(p, "window_length", cfg.pipeline.window_length);
    if (cfg.pipeline.window_length == 0) throw ConfigError("window_length must be positive");
    const std::string norm = get_or<std::string>(
        p, "normalization", cfg.pipeline.normalization == Normalization::ZScore ? "zscore"
                                                                                 : "none");
    if (norm == "zscore") {
      cfg.pipeline.normalization = Normalization::ZScore;
    } else if (norm == "none") {
      cfg.pipeline.normalization = Normalization::None;
    } else {
      throw ConfigError("normalization must be 'zscore' or 'none'");
    }
    const std::string dir = get_or<std::string>(
        p, "initial_direction",
        cfg.pipeline.initial_merge_direction == TrendDirection::Ascending ? "ascending"
                                                                          : "descending");
    if (dir == "ascending") {
      cfg.pipeline.initial_merge_direction = TrendDirection::Ascending;
    } else if (dir == "descending") {
      cfg.pipeline.initial_merge_direction = TrendDirection::Descending;
    } else {
      throw ConfigError("initial_direction must be 'ascending' or 'descending'");
    }
  }

  if (j.contains("env")) {
    const json& e = j["env"];
    cfg.env.fee_rate = get_or<double>(e, "fee_rate", cfg.env.fee_rate);
    cfg.env.initial_cash = get_or<double>(e, "initial_cash", cfg.env.initial_cash);
    if (cfg.env.fee_rate < 0) throw ConfigError("fee_rate must be non-negative");
    if (cfg.env.initial_cash <= 0) throw ConfigError("initial_cash must be positive");
  }

  if (j.contains("agent")) {
    const json& a = j["agent"];
    cfg.agent.kind = parse_agent_kind(
        get_or<std::string>(a, "kind", agent_kind_name(cfg.agent.kind)));
    if (a.contains("ddpg")) {
      const json& d = a["ddpg"];
      DdpgHyper& h = cfg.agent.ddpg;
      h.gamma = get_or<double>(d, "gamma", h.gamma);
      h.tau = get_or<double>(d, "tau", h.tau);
      h.lr_actor = get_or<double>(d, "lr_actor", h.lr_actor);
      h.lr_critic = get_or<double>(d, "lr_critic", h.lr_critic);
      h.batch_size = get_or<std::size_t>(d, "batch_size", h.batch_size);
      h.replay_capacity = get_or<std::size_t>(d, "replay_capacity", h.replay_capacity);
      h.warmup_steps = get_or<std::size_t>(d, "warmup_steps", h.warmup_steps);
      h.noise_sigma = get_or<double>(d, "noise_sigma", h.noise_sigma);
      h.actor_hidden = hidden_from_json(d.contains("actor_hidden") ? d["actor_hidden"] : json(),
                                        h.actor_hidden);
      h.critic_hidden = hidden_from_json(
          d.contains("critic_hidden") ? d["critic_hidden"] : json(), h.critic_hidden);
      if (!(h.gamma >= 0 && h.gamma < 1)) throw ConfigError("ddpg.gamma must be in [0,1)");
      if (!(h.tau > 0 && h.tau <= 1)) throw ConfigError("ddpg.tau must be in (0,1]");
    }
    if (a.contains("dqn")) {
      const json& d = a["dqn"];
      DqnHyper& h = cfg.agent.dqn;
      h.gamma = get_or<double>(d, "gamma", h.gamma);
      h.lr = get_or<double>(d, "lr", h.lr);
      h.batch_size = get_or<std::size_t>(d, "batch_size", h.batch_size);
      h.replay_capacity = get_or<std::size_t>(d, "replay_capacity", h.replay_capacity);
      h.warmup_steps = get_or<std::size_t>(d, "warmup_steps", h.warmup_steps);
      h.target_sync_period = get_or<std::size_t>(d, "target_sync_period", h.target_sync_period);
      h.epsilon = get_or<double>(d, "epsilon", h.epsilon);
      h.hidden = hidden_from_json(d.contains("hidden") ? d["hidden"] : json(), h.hidden);
      if (!(h.gamma >= 0 && h.gamma < 1)) throw ConfigError("dqn.gamma must be in [0,1)");
      if (!(h.epsilon >= 0 && h.epsilon <= 1)) throw ConfigError("dqn.epsilon must be in [0,1]");
    }
    if (a.contains("schedule")) {
      const json& s = a["schedule"];
      TrainSchedule& t = cfg.agent.schedule;
      t.episodes = get_or<std::size_t>(s, "episodes", t.episodes);
      t.episode_length = get_or<std::size_t>(s, "episode_length", t.episode_length);
      t.explore_start = get_or<double>(s, "explore_start", t.explore_start);
      t.explore_end = get_or<double>(s, "explore_end", t.explore_end);
      if (t.episode_length == 0) throw ConfigError("episode_length must be positive");
    }
  }

  if (j.contains("metrics")) {
    const json& m = j["metrics"];
    cfg.metrics.rf_annual = get_or<double>(m, "rf_annual", cfg.metrics.rf_annual);
    cfg.metrics.periods_per_year =
        get_or<double>(m, "periods_per_year", cfg.metrics.periods_per_year);
    if (cfg.metrics.periods_per_year <= 0) {
      throw ConfigError("periods_per_year must be positive");
    }
  }

  if (j.contains("run")) {
    const json& r = j["run"];
    if (r.contains("seeds")) {
      try {
        cfg.run.seeds = r["seeds"].get<std::vector<std::uint64_t>>();
      } catch (const json::exception& e) {
        throw ConfigError(std::string("bad seeds list: ") + e.what());
      }
      if (cfg.run.seeds.empty()) throw ConfigError("seeds list must not be empty");
    }
    cfg.run.out_dir = get_or<std::string>(r, "out_dir", cfg.run.out_dir);
  }

  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["data"] = json{{"source", cfg.data.source},
                   {"csv_path", cfg.data.csv_path},
                   {"synth", synth_to_json(cfg.data.synth)},
                   {"train_begin", cfg.data.train_begin},
                   {"train_end", cfg.data.train_end},
                   {"test_begin", cfg.data.test_begin},
                   {"test_end", cfg.data.test_end}};
  json scales = json::array();
  for (const TimeScale& s : cfg.pipeline.stroke_scales) scales.push_back(s.name());
  j["pipeline"] =
      json{{"raw_scale", cfg.pipeline.raw_scale.name()},
           {"stroke_scales", scales},
           {"window_length", cfg.pipeline.window_length},
           {"normalization",
            cfg.pipeline.normalization == Normalization::ZScore ? "zscore" : "none"},
           {"initial_direction",
            cfg.pipeline.initial_merge_direction == TrendDirection::Ascending ? "ascending"
                                                                              : "descending"}};
  j["env"] = json{{"fee_rate", cfg.env.fee_rate}, {"initial_cash", cfg.env.initial_cash}};
  j["agent"] = json{
      {"kind", agent_kind_name(cfg.agent.kind)},
      {"ddpg",
       json{{"gamma", cfg.agent.ddpg.gamma},
            {"tau", cfg.agent.ddpg.tau},
            {"lr_actor", cfg.agent.ddpg.lr_actor},
            {"lr_critic", cfg.agent.ddpg.lr_critic},
            {"batch_size", cfg.agent.ddpg.batch_size},
            {"replay_capacity", cfg.agent.ddpg.replay_capacity},
            {"warmup_steps", cfg.agent.ddpg.warmup_steps},
            {"noise_sigma", cfg.agent.ddpg.noise_sigma},
            {"actor_hidden", hidden_to_json(cfg.agent.ddpg.actor_hidden)},
            {"critic_hidden", hidden_to_json(cfg.agent.ddpg.critic_hidden)}}},
      {"dqn",
       json{{"gamma", cfg.agent.dqn.gamma},
            {"lr", cfg.agent.dqn.lr},
            {"batch_size", cfg.agent.dqn.batch_size},
            {"replay_capacity", cfg.agent.dqn.replay_capacity},
            {"warmup_steps", cfg.agent.dqn.warmup_steps},
            {"target_sync_period", cfg.agent.dqn.target_sync_period},
            {"epsilon", cfg.agent.dqn.epsilon},
            {"hidden", hidden_to_json(cfg.agent.dqn.hidden)}}},
      {"schedule",
       json{{"episodes", cfg.agent.schedule.episodes},
            {"episode_length", cfg.agent.schedule.episode_length},
            {"explore_start", cfg.agent.schedule.explore_start},
            {"explore_end", cfg.agent.schedule.explore_end}}}};
  j["metrics"] = json{{"rf_annual", cfg.metrics.rf_annual},
                      {"periods_per_year", cfg.metrics.periods_per_year}};
  j["run"] = json{{"seeds", cfg.run.seeds}, {"out_dir", cfg.run.out_dir}};
  return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_config(const RunConfig& cfg) {
  const std::int64_t tb = endpoint_order_key(cfg.data.train_begin);
  const std::int64_t te = endpoint_order_key(cfg.data.train_end);
  const std::int64_t sb = endpoint_order_key(cfg.data.test_begin);
  const std::int64_t se = endpoint_order_key(cfg.data.test_end);
  const bool mixed = is_index_endpoint(cfg.data.train_begin) != is_index_endpoint(cfg.data.test_begin) ||
                     is_index_endpoint(cfg.data.train_end) != is_index_endpoint(cfg.data.test_end) ||
                     is_index_endpoint(cfg.data.train_begin) != is_index_endpoint(cfg.data.train_end);
  if (mixed) throw ConfigError("range endpoints must be all indices or all dates");
  if (!(tb < te)) throw ConfigError("train range is empty or inverted");
  if (!(sb < se)) throw ConfigError("test range is empty or inverted");
  if (!(te <= sb)) throw ConfigError("train range must precede and not overlap test range");
  if (cfg.data.source == "csv" && cfg.data.csv_path.empty()) {
    throw ConfigError("data.source 'csv' requires csv_path");
  }
  for (std::size_t i = 1; i < cfg.pipeline.stroke_scales.size(); ++i) {
    if (!cfg.pipeline.stroke_scales[i].coarser_than(cfg.pipeline.stroke_scales[i - 1])) {
      throw ConfigError("stroke_scales must be strictly increasing in coarseness");
    }
  }
}

DataBundle build_bundle(const RunConfig& cfg) {
  DataBundle b;
  if (cfg.data.source == "csv") {
    b.series = load_csv(cfg.data.csv_path, cfg.pipeline.raw_scale);
  } else {
    SynthSpec spec = cfg.data.synth;
    spec.scale = cfg.pipeline.raw_scale;
    b.series = synth_series(spec);
  }
  b.train_begin = resolve_endpoint(b.series, cfg.data.train_begin);
  b.train_end = resolve_endpoint(b.series, cfg.data.train_end);
  b.test_begin = resolve_endpoint(b.series, cfg.data.test_begin);
  b.test_end = resolve_endpoint(b.series, cfg.data.test_end);
  if (b.train_begin >= b.train_end) throw DataError("train range resolves to an empty span");
  if (b.test_begin >= b.test_end) throw DataError("test range resolves to an empty span");
  return b;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace mss
