#include "msstrade/features.hpp"

#include <algorithm>
#include <cmath>

#include "msstrade/errors.hpp"

namespace mss {

StrokeTable confirmed_stroke_table(const BarSeries& series, TrendDirection initial) {
  StrokeTable table;
  if (series.empty()) return table;
  ChanResult chan = run_chan(series, initial);
  if (chan.strokes.size() <= 1) return table;
  table.reserve(chan.strokes.size() - 1);
  for (std::size_t i = 0; i + 1 < chan.strokes.size(); ++i) {
    table.push_back(chan.strokes[i].span);
  }
  return table;
}

FeatureMatrix build_observation(const BarSeries& raw, const std::vector<StrokeTable>& tables,
                                std::size_t t, const PipelineConfig& cfg) {
  if (t >= raw.size()) throw IndexError("observation index out of range");
  if (tables.size() != cfg.stroke_scales.size()) {
    throw ShapeError("stroke table count does not match configured scales");
  }

  const std::size_t window = cfg.window_length;
  FeatureMatrix m;
  m.window = window;
  m.meta.push_back(LayerMeta{cfg.raw_scale, LayerKind::RawBars});
  for (const TimeScale& s : cfg.stroke_scales) m.meta.push_back(LayerMeta{s, LayerKind::Strokes});
  m.real_rows.assign(m.layer_count(), 0);
  m.data.assign(m.layer_count() * window * kFeatureCols, 0.0);

  // Layer 0: the last `window` raw bars ending at t, left-padded.
  const std::size_t avail = std::min(window, t + 1);
  m.real_rows[0] = avail;
  for (std::size_t r = 0; r < avail; ++r) {
    const Bar& b = raw[t + 1 - avail + r];
    const std::size_t row = window - avail + r;
    m.at(0, row, 0) = b.open;
    m.at(0, row, 1) = b.close;
    m.at(0, row, 2) = b.high;
    m.at(0, row, 3) = b.low;
    m.at(0, row, 4) = b.volume;
    m.at(0, row, 5) = 0.0;
  }

  for (std::size_t layer = 1; layer < m.layer_count(); ++layer) {
    const StrokeTable& table = tables[layer - 1];
    const std::size_t rows = std::min(window, table.size());
    m.real_rows[layer] = rows;
    for (std::size_t r = 0; r < rows; ++r) {
      const SpanFeatures& f = table[table.size() - rows + r];
      const std::size_t row = window - rows + r;
      m.at(layer, row, 0) = f.open;
      m.at(layer, row, 1) = f.close;
      m.at(layer, row, 2) = f.high;
      m.at(layer, row, 3) = f.low;
      m.at(layer, row, 4) = f.volume;
      m.at(layer, row, 5) = f.trend;
    }
  }
  return m;
}

std::vector<LayerStats> window_stats(const FeatureMatrix& m) {
  std::vector<LayerStats> stats(m.layer_count());
  for (std::size_t layer = 0; layer < m.layer_count(); ++layer) {
    LayerStats& ls = stats[layer];
    ls.mean.assign(kFeatureCols, 0.0);
    ls.stddev.assign(kFeatureCols, 1.0);
    const std::size_t rows = m.real_rows[layer];
    if (rows == 0) continue;
    const std::size_t start = m.window - rows;
    for (std::size_t col = 0; col < kFeatureCols; ++col) {
      double sum = 0;
      for (std::size_t r = start; r < m.window; ++r) sum += m.at(layer, r, col);
      const double mean = sum / static_cast<double>(rows);
      double var = 0;
      for (std::size_t r = start; r < m.window; ++r) {
        const double d = m.at(layer, r, col) - mean;
        var += d * d;
      }
      ls.mean[col] = mean;
      ls.stddev[col] = std::max(std::sqrt(var / static_cast<double>(rows)), 1e-8);
    }
  }
  return stats;
}

FeatureMatrix normalize_observation(const FeatureMatrix& m,
                                    const std::vector<LayerStats>& stats) {
  if (stats.size() != m.layer_count()) throw ShapeError("stats/layer count mismatch");
  FeatureMatrix out = m;
  for (std::size_t layer = 0; layer < m.layer_count(); ++layer) {
    const std::size_t rows = m.real_rows[layer];
    const std::size_t start = m.window - rows;
    for (std::size_t r = start; r < m.window; ++r) {
      for (std::size_t col = 0; col + 1 < kFeatureCols; ++col) {  // trend passes through
        out.at(layer, r, col) =
            (m.at(layer, r, col) - stats[layer].mean[col]) / stats[layer].stddev[col];
      }
    }
  }
  return out;
}

ObservationTimeline::ObservationTimeline(const BarSeries& raw, const PipelineConfig& cfg)
    : raw_(raw), cfg_(cfg) {
  if (cfg_.window_length == 0) throw ConfigError("window_length must be >= 1");
  if (raw_.scale != cfg_.raw_scale) throw ScaleError("raw series scale does not match config");
  for (std::size_t i = 1; i < cfg_.stroke_scales.size(); ++i) {
    if (!cfg_.stroke_scales[i].coarser_than(cfg_.stroke_scales[i - 1])) {
      throw ConfigError("stroke scales must be strictly increasing in coarseness");
    }
  }

  const std::size_t n = raw_.size();
  tables_.assign(n, {});
  BarSeries prefix;
  prefix.scale = raw_.scale;
  prefix.bars.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    prefix.bars.push_back(raw_.bars[t]);
    std::vector<StrokeTable>& per_scale = tables_[t];
    per_scale.reserve(cfg_.stroke_scales.size());
    for (const TimeScale& scale : cfg_.stroke_scales) {
      const BarSeries scaled = scale == raw_.scale ? prefix : resample(prefix, scale);
      StrokeTable table = confirmed_stroke_table(scaled, cfg_.initial_merge_direction);
      if (table.size() > cfg_.window_length) {
        table.erase(table.begin(),
                    table.end() - static_cast<std::ptrdiff_t>(cfg_.window_length));
      }
      per_scale.push_back(std::move(table));
    }
  }
}

FeatureMatrix ObservationTimeline::observation(std::size_t t) const {
  if (t >= raw_.size()) throw IndexError("observation index out of range");
  return build_observation(raw_, tables_[t], t, cfg_);
}

std::vector<double> ObservationTimeline::features(std::size_t t) const {
  FeatureMatrix m = observation(t);
  if (cfg_.normalization == Normalization::ZScore) {
    m = normalize_observation(m, window_stats(m));
  }
  return m.data;
}

}  // namespace mss
