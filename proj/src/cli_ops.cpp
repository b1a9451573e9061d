#include "msstrade/cli_ops.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "msstrade/errors.hpp"
#include "msstrade/timeutil.hpp"

namespace mss {

namespace fs = std::filesystem;

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + path + "'");
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  write_text_file(tmp, content);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("atomic replace of '" + path + "' failed: " + ec.message());
}

std::string cmd_synth(const RunConfig& cfg, const std::string& out_path) {
  SynthSpec spec = cfg.data.synth;
  spec.scale = cfg.pipeline.raw_scale;
  const BarSeries series = synth_series(spec);
  if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  save_csv(series, out_path);
  return out_path;
}

std::string shapes_csv(const std::vector<Shape>& shapes) {
  std::ostringstream out;
  out << "center,kind,pivot,timestamp\n";
  for (const Shape& s : shapes) {
    out << s.center << ',' << (s.kind == ShapeKind::Top ? "top" : "bottom") << ','
        << fmt_num(s.pivot_price) << ',' << format_timestamp(s.timestamp) << '\n';
  }
  return out.str();
}

std::string strokes_csv(const std::vector<Stroke>& strokes) {
  std::ostringstream out;
  out << "start_center,end_center,direction,start_ts,end_ts,open,close,high,low,volume,trend\n";
  for (const Stroke& s : strokes) {
    out << s.start.center << ',' << s.end.center << ','
        << (s.direction == StrokeDirection::Rising ? "rising" : "descending") << ','
        << format_timestamp(s.start.timestamp) << ',' << format_timestamp(s.end.timestamp) << ','
        << fmt_num(s.span.open) << ',' << fmt_num(s.span.close) << ',' << fmt_num(s.span.high)
        << ',' << fmt_num(s.span.low) << ',' << fmt_num(s.span.volume) << ','
        << fmt_num(s.span.trend) << '\n';
  }
  return out.str();
}

std::vector<std::string> cmd_extract(const BarSeries& raw, const std::vector<TimeScale>& scales,
                                     TrendDirection initial, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (const TimeScale& scale : scales) {
    const BarSeries scaled = resample(raw, scale);
    const ChanResult result = run_chan(scaled, initial);
    const std::string shapes_path = out_dir + "/shapes_" + scale.name() + ".csv";
    const std::string strokes_path = out_dir + "/strokes_" + scale.name() + ".csv";
    write_text_file(shapes_path, shapes_csv(result.shapes));
    write_text_file(strokes_path, strokes_csv(result.strokes));
    written.push_back(shapes_path);
    written.push_back(strokes_path);
  }
  return written;
}

PipelineConfig effective_pipeline(const RunConfig& cfg) {
  PipelineConfig p = cfg.pipeline;
  if (cfg.agent.kind != AgentKind::MssDdpg) p.stroke_scales.clear();
  return p;
}

std::string checkpoint_path(const std::string& dir, AgentKind kind, std::uint64_t seed) {
  return dir + "/" + agent_kind_name(kind) + "_seed" + std::to_string(seed) + ".ckpt";
}

TrainArtifacts cmd_train(const RunConfig& cfg) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const DataBundle bundle = build_bundle(cfg);
  fs::create_directories(cfg.run.out_dir);

  TrainArtifacts art;
  const bool learns = cfg.agent.kind == AgentKind::Dqn || cfg.agent.kind == AgentKind::Ddpg ||
                      cfg.agent.kind == AgentKind::MssDdpg;
  if (learns) {
    const BarSeries train_slice =
        slice_series(bundle.series, bundle.train_begin, bundle.train_end);
    const ObservationTimeline timeline(train_slice, effective_pipeline(cfg));
    const std::size_t obs_dim = timeline.feature_dim() + 2;
    for (const std::uint64_t seed : cfg.run.seeds) {
      const std::uint64_t loop_seed = seed + 1000003;
      TrainingLog log;
      const std::string ckpt = checkpoint_path(cfg.run.out_dir, cfg.agent.kind, seed);
      if (cfg.agent.kind == AgentKind::Dqn) {
        DqnAgent agent(obs_dim, cfg.agent.dqn, seed);
        log = train_dqn(agent, timeline, cfg.env, cfg.agent.schedule, loop_seed);
        agent.save(ckpt);
      } else {
        DdpgAgent agent(obs_dim, cfg.agent.ddpg, seed);
        log = train_ddpg(agent, timeline, cfg.env, cfg.agent.schedule, loop_seed);
        agent.save(ckpt);
      }
      const std::string log_path =
          cfg.run.out_dir + "/train_log_" + agent_kind_name(cfg.agent.kind) + "_seed" +
          std::to_string(seed) + ".csv";
      write_text_file(log_path, log.csv());
      art.checkpoint_paths.push_back(ckpt);
      art.log_paths.push_back(log_path);
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  art.wall_clock_seconds = std::chrono::duration<double>(t1 - t0).count();

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["agent"] = agent_kind_name(cfg.agent.kind);
  manifest["config_hash"] = config_hash(cfg);
  manifest["config"] = nlohmann::json::parse(serialize_config(cfg));
  manifest["seeds"] = cfg.run.seeds;
  manifest["wall_clock_seconds"] = art.wall_clock_seconds;
  manifest["checkpoints"] = art.checkpoint_paths;
  manifest["logs"] = art.log_paths;
  art.manifest_path = cfg.run.out_dir + "/manifest.json";
  write_file_atomic(art.manifest_path, manifest.dump(2) + "\n");
  return art;
}

namespace {

struct NamedCurve {
  std::string name;
  std::uint64_t seed = 0;
  bool is_market = false;
  EquityCurve curve;
};

}  // namespace

BacktestArtifacts cmd_backtest(const RunConfig& cfg, const std::string& checkpoint_dir) {
  validate_config(cfg);
  const DataBundle bundle = build_bundle(cfg);
  fs::create_directories(cfg.run.out_dir);
  const std::size_t last = bundle.test_end - 1;
  const std::string dataset =
      cfg.data.source == "csv" ? fs::path(cfg.data.csv_path).stem().string() : "synth";

  std::vector<NamedCurve> rows;
  const EquityCurve market =
      market_curve(bundle.series, bundle.test_begin, last, cfg.env.initial_cash);
  rows.push_back({"buy_and_hold", 0, true, market});

  // rule baselines and learned policies share the evaluation env end to end
  const BarSeries eval_slice = slice_series(bundle.series, 0, bundle.test_end);
  {
    PipelineConfig raw_only = cfg.pipeline;
    raw_only.stroke_scales.clear();
    const ObservationTimeline rule_timeline(eval_slice, raw_only);
    rows.push_back({"turtle", 0, false,
                    evaluate_policy(rule_timeline, cfg.env, bundle.test_begin,
                                    make_turtle_policy())});
  }

  const bool learns = cfg.agent.kind == AgentKind::Dqn || cfg.agent.kind == AgentKind::Ddpg ||
                      cfg.agent.kind == AgentKind::MssDdpg;
  if (learns) {
    const ObservationTimeline timeline(eval_slice, effective_pipeline(cfg));
    const std::size_t obs_dim = timeline.feature_dim() + 2;
    for (const std::uint64_t seed : cfg.run.seeds) {
      const std::string ckpt = checkpoint_path(checkpoint_dir, cfg.agent.kind, seed);
      EquityCurve curve;
      if (cfg.agent.kind == AgentKind::Dqn) {
        DqnAgent agent(obs_dim, cfg.agent.dqn, seed);
        agent.load(ckpt);
        curve = evaluate_policy(timeline, cfg.env, bundle.test_begin, make_dqn_policy(agent));
      } else {
        DdpgAgent agent(obs_dim, cfg.agent.ddpg, seed);
        agent.load(ckpt);
        curve = evaluate_policy(timeline, cfg.env, bundle.test_begin, make_ddpg_policy(agent));
      }
      rows.push_back({agent_kind_name(cfg.agent.kind), seed, false, std::move(curve)});
    }
  }

  BacktestArtifacts art;
  std::vector<std::string> plot_names;
  std::vector<EquityCurve> plot_curves;
  for (const NamedCurve& row : rows) {
    art.reports.push_back(build_report(row.curve, market, cfg.metrics, row.name, dataset,
                                       row.seed, row.is_market));
    std::string label = row.name;
    if (!row.is_market && row.seed != 0) label += "_seed" + std::to_string(row.seed);
    const std::string path = cfg.run.out_dir + "/equity_" + label + ".csv";
    write_text_file(path, equity_csv(row.curve));
    art.equity_paths.push_back(path);
    plot_names.push_back(label);
    plot_curves.push_back(row.curve);
  }
  art.report_path = cfg.run.out_dir + "/report.csv";
  write_text_file(art.report_path, report_csv(art.reports));
  art.plot_path = cfg.run.out_dir + "/equity.svg";
  write_text_file(art.plot_path, equity_plot_svg(plot_names, plot_curves));
  return art;
}

std::string equity_plot_svg(const std::vector<std::string>& names,
                            const std::vector<EquityCurve>& curves) {
  if (names.size() != curves.size()) throw SpecError("plot names/curves mismatch");
  constexpr double kW = 960, kH = 540;
  constexpr double kLeft = 70, kRight = 25, kTop = 25, kBottom = 45;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;

  double lo = 1.0, hi = 1.0;
  std::size_t max_len = 2;
  for (const EquityCurve& c : curves) {
    if (c.values.size() < 2) continue;
    max_len = std::max(max_len, c.values.size());
    for (double v : c.values) {
      const double norm = v / c.values.front();
      lo = std::min(lo, norm);
      hi = std::max(hi, norm);
    }
  }
  const double pad = 0.05 * (hi - lo + 1e-9);
  lo -= pad;
  hi += pad;

  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };
  auto x_at = [&](std::size_t i) {
    return kLeft + plot_w * static_cast<double>(i) / static_cast<double>(max_len - 1);
  };
  auto y_at = [&](double norm) { return kTop + plot_h * (hi - norm) / (hi - lo); };

  static const char* kPalette[] = {"#4878a8", "#e08214", "#2e8b57",
                                   "#b22222", "#7b4ea3", "#2aa198"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kW << ' ' << kH
      << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"#444\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double norm = lo + (hi - lo) * i / 4.0;
    const double y = y_at(norm);
    out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt(y) << "\" x2=\"" << kLeft
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\">" << fmt(norm) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\">bar</text>\n";
  out << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kTop + plot_h / 2
      << ")\">net value</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (curves[c].values.size() < 2) continue;
    const char* color = kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < curves[c].values.size(); ++i) {
      if (i) out << ' ';
      out << fmt(x_at(i)) << ',' << fmt(y_at(curves[c].values[i] / curves[c].values.front()));
    }
    out << "\"/>\n";
    const double ly = kTop + 16 + 18 * static_cast<double>(c);
    out << "<line x1=\"" << kLeft + 12 << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << kLeft + 40
        << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + 46 << "\" y=\"" << fmt(ly) << "\">" << names[c]
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace mss
