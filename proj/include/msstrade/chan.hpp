#pragma once

#include <cstdint>
#include <vector>

#include "msstrade/bars.hpp"

namespace mss {

enum class TrendDirection { Ascending, Descending };

// An inclusion-free bar produced by directional merging. `span_begin` /
// `span_end` are the inclusive source-bar indices it covers; `timestamp` is
// the close time of the last constituent bar.
struct MergedBar {
  double low = 0;
  double high = 0;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
  std::int64_t timestamp = 0;
};

// True when one of the two range-containment conditions holds between
// consecutive bars. Equal highs or equal lows never count as inclusion.
bool is_inclusion(const MergedBar& a, const MergedBar& b);

enum class ShapeKind { Top, Bottom };

// Three-bar fractal turning point. `center` indexes the MergedBar list;
// `pivot_price` is the center bar's high for a Top, low for a Bottom.
struct Shape {
  ShapeKind kind = ShapeKind::Top;
  std::size_t center = 0;
  double pivot_price = 0;
  std::int64_t timestamp = 0;
};

enum class StrokeDirection { Rising, Descending };

// OHLCV summary of a stroke's source-bar span plus the +1/-1 trend judgment.
struct SpanFeatures {
  double open = 0;
  double close = 0;
  double high = 0;
  double low = 0;
  double volume = 0;
  double trend = 0;
};

struct Stroke {
  Shape start;
  Shape end;
  StrokeDirection direction = StrokeDirection::Rising;
  SpanFeatures span;  // filled by annotate_strokes / stroke_span_features
};

// Single left-to-right pass: each source bar is merged into the tail of the
// output while an inclusion remains, using max/max merging in an ascending
// context and min/min in a descending one. The context is the trend between
// the last two distinct merged bars; before any distinct pair exists,
// `initial` applies. Throws EmptyError on an empty series and DataError on a
// degenerate bar (high == low).
std::vector<MergedBar> remove_inclusions(const BarSeries& series,
                                         TrendDirection initial = TrendDirection::Ascending);

// Emits every center whose high and low are strictly above both neighbours'
// (Top) or strictly below (Bottom). Fewer than 3 bars -> empty list.
std::vector<Shape> detect_shapes(const std::vector<MergedBar>& merged);

// Connects alternating shapes into strokes under the strict rules:
//  (1) consecutive same-kind shapes collapse to the more extreme one;
//  (2) at least 5 merged bars inclusive between the two extreme bars;
//  (3) the top-shape pivot must exceed the bottom-shape pivot.
// Candidates failing (2) or (3) are skipped and the search continues. The
// final stroke's endpoint is still mutable under future data; callers that
// need confirmed strokes must drop the last one.
std::vector<Stroke> extract_strokes(const std::vector<Shape>& shapes,
                                    const std::vector<MergedBar>& merged);

SpanFeatures stroke_span_features(const Stroke& stroke, const std::vector<MergedBar>& merged,
                                  const BarSeries& source);

void annotate_strokes(std::vector<Stroke>& strokes, const std::vector<MergedBar>& merged,
                      const BarSeries& source);

struct ChanResult {
  std::vector<MergedBar> merged;
  std::vector<Shape> shapes;
  std::vector<Stroke> strokes;  // annotated
};

ChanResult run_chan(const BarSeries& series,
                    TrendDirection initial = TrendDirection::Ascending);

// Append-driven wrapper around the batch pipeline. Re-extracts on every
// append; on a shared prefix its output equals the batch output except for
// the last (still-mutable) stroke.
class StreamingExtractor {
 public:
  explicit StreamingExtractor(TimeScale scale,
                              TrendDirection initial = TrendDirection::Ascending);

  void append(const Bar& bar);
  const BarSeries& series() const { return series_; }
  const ChanResult& current() const { return result_; }

  // Strokes whose endpoints can no longer change: everything but the last.
  std::vector<Stroke> confirmed_strokes() const;

 private:
  BarSeries series_;
  TrendDirection initial_;
  ChanResult result_;
};

}  // namespace mss
