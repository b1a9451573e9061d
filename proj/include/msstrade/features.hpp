#pragma once

#include <cstdint>
#include <vector>

#include "msstrade/bars.hpp"
#include "msstrade/chan.hpp"

namespace mss {

inline constexpr std::size_t kFeatureCols = 6;  // open, close, high, low, volume, trend

enum class LayerKind { RawBars, Strokes };

struct LayerMeta {
  TimeScale scale = TimeScale::day();
  LayerKind kind = LayerKind::RawBars;
};

// Stacked observation: layer 0 is the raw-bar window at the finest scale,
// layers 1..n are confirmed-stroke records per configured scale. All layers
// share `window` rows; short history is left-padded with all-zero rows.
struct FeatureMatrix {
  std::size_t window = 0;
  std::vector<LayerMeta> meta;
  std::vector<std::size_t> real_rows;  // per layer, count of non-pad rows (suffix)
  std::vector<double> data;            // layer-major, row-major inside a layer

  std::size_t layer_count() const { return meta.size(); }
  double at(std::size_t layer, std::size_t row, std::size_t col) const {
    return data[(layer * window + row) * kFeatureCols + col];
  }
  double& at(std::size_t layer, std::size_t row, std::size_t col) {
    return data[(layer * window + row) * kFeatureCols + col];
  }
};

enum class Normalization { None, ZScore };

struct PipelineConfig {
  TimeScale raw_scale = TimeScale::day();
  std::vector<TimeScale> stroke_scales{TimeScale::day(), TimeScale::week(),
                                       TimeScale::month()};
  std::size_t window_length = 30;
  Normalization normalization = Normalization::ZScore;
  TrendDirection initial_merge_direction = TrendDirection::Ascending;
};

using StrokeTable = std::vector<SpanFeatures>;

// Strokes of the series whose endpoints are no longer mutable: the batch
// extraction minus its last stroke, as span-feature rows in time order.
StrokeTable confirmed_stroke_table(const BarSeries& series, TrendDirection initial);

// Assembles the observation at bar index `t`. `tables` must hold, per entry
// of cfg.stroke_scales, stroke rows built only from data at or before
// raw[t].timestamp. Throws IndexError when t is out of range.
FeatureMatrix build_observation(const BarSeries& raw, const std::vector<StrokeTable>& tables,
                                std::size_t t, const PipelineConfig& cfg);

struct LayerStats {
  std::vector<double> mean;    // kFeatureCols entries
  std::vector<double> stddev;  // population std, floored at 1e-8
};

// Per-layer column stats over the non-pad rows of the window itself.
std::vector<LayerStats> window_stats(const FeatureMatrix& m);

// Per-layer, per-column z-score. The trend column and pad rows pass through
// unchanged.
FeatureMatrix normalize_observation(const FeatureMatrix& m,
                                    const std::vector<LayerStats>& stats);

// Precomputed causal observations: everything at index t is derived from the
// raw prefix bars[0..t] alone, so appending future bars never changes it.
class ObservationTimeline {
 public:
  ObservationTimeline(const BarSeries& raw, const PipelineConfig& cfg);

  std::size_t size() const { return raw_.size(); }
  const BarSeries& raw() const { return raw_; }
  const PipelineConfig& config() const { return cfg_; }

  // First index with a full raw window (earlier indices are valid but padded).
  std::size_t first_full_window() const { return cfg_.window_length - 1; }

  FeatureMatrix observation(std::size_t t) const;

  // Observation with cfg normalization applied, flattened row-major.
  std::vector<double> features(std::size_t t) const;
  std::size_t feature_dim() const {
    return (cfg_.stroke_scales.size() + 1) * cfg_.window_length * kFeatureCols;
  }

 private:
  BarSeries raw_;
  PipelineConfig cfg_;
  // [t][scale] -> last window_length confirmed stroke rows as of t.
  std::vector<std::vector<StrokeTable>> tables_;
};

}  // namespace mss
