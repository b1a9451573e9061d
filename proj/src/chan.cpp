#include "msstrade/chan.hpp"

#include <algorithm>

#include "msstrade/errors.hpp"

namespace mss {

bool is_inclusion(const MergedBar& a, const MergedBar& b) {
  const bool b_contains_a = a.high < b.high && a.low > b.low;
  const bool a_contains_b = a.high > b.high && a.low < b.low;
  return b_contains_a || a_contains_b;
}

namespace {

// Trend between the last two distinct merged bars at or before `upto`
// (inclusive index of the left bar of the merging pair). Bars with equal
// highs do not decide a trend; scan further back.
TrendDirection context_direction(const std::vector<MergedBar>& merged, std::size_t upto,
                                 TrendDirection fallback) {
  for (std::size_t j = upto; j >= 1; --j) {
    if (merged[j].high != merged[j - 1].high) {
      return merged[j].high > merged[j - 1].high ? TrendDirection::Ascending
                                                 : TrendDirection::Descending;
    }
  }
  return fallback;
}

MergedBar merge_pair(const MergedBar& left, const MergedBar& right, TrendDirection dir) {
  MergedBar out;
  if (dir == TrendDirection::Ascending) {
    out.low = std::max(left.low, right.low);
    out.high = std::max(left.high, right.high);
  } else {
    out.low = std::min(left.low, right.low);
    out.high = std::min(left.high, right.high);
  }
  out.span_begin = left.span_begin;
  out.span_end = right.span_end;
  out.timestamp = right.timestamp;
  return out;
}

}  // namespace

std::vector<MergedBar> remove_inclusions(const BarSeries& series, TrendDirection initial) {
  if (series.empty()) throw EmptyError("cannot remove inclusions from an empty series");

  std::vector<MergedBar> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Bar& b = series[i];
    if (!(b.low < b.high)) {
      throw DataError("degenerate bar (high == low) at index " + std::to_string(i));
    }
    out.push_back(MergedBar{b.low, b.high, i, i, b.timestamp});
    // Merging can itself create a new inclusion with the bar before, so keep
    // collapsing the tail until the pair is clean.
    while (out.size() >= 2 && is_inclusion(out[out.size() - 2], out.back())) {
      const std::size_t left = out.size() - 2;
      const TrendDirection dir =
          left >= 1 ? context_direction(out, left, initial) : initial;
      MergedBar merged = merge_pair(out[left], out.back(), dir);
      out.pop_back();
      out.back() = merged;
    }
  }
  return out;
}

std::vector<Shape> detect_shapes(const std::vector<MergedBar>& merged) {
  std::vector<Shape> shapes;
  if (merged.size() < 3) return shapes;
  for (std::size_t i = 1; i + 1 < merged.size(); ++i) {
    const MergedBar& a = merged[i - 1];
    const MergedBar& c = merged[i];
    const MergedBar& b = merged[i + 1];
    if (a.high < c.high && b.high < c.high && a.low < c.low && b.low < c.low) {
      shapes.push_back(Shape{ShapeKind::Top, i, c.high, c.timestamp});
    } else if (a.high > c.high && b.high > c.high && a.low > c.low && b.low > c.low) {
      shapes.push_back(Shape{ShapeKind::Bottom, i, c.low, c.timestamp});
    }
  }
  return shapes;
}

std::vector<Stroke> extract_strokes(const std::vector<Shape>& shapes,
                                    const std::vector<MergedBar>& merged) {
  (void)merged;
  std::vector<Shape> pivots;
  for (const Shape& s : shapes) {
    if (pivots.empty()) {
      pivots.push_back(s);
      continue;
    }
    Shape& last = pivots.back();
    if (s.kind == last.kind) {
      // Rule (1) extension: a later, more extreme same-kind shape takes over
      // the tentative endpoint. It lies further right, so the stroke into it
      // can only lengthen, and its pivot is more extreme, so rule (3) keeps
      // holding for the stroke before it.
      const bool more_extreme = s.kind == ShapeKind::Top ? s.pivot_price > last.pivot_price
                                                         : s.pivot_price < last.pivot_price;
      if (more_extreme) last = s;
      continue;
    }
    // Rule (2): inclusive merged-bar count between the extreme bars.
    const std::size_t bar_count = s.center - last.center + 1;
    // Rule (3): top pivot above bottom pivot, which is also the
    // rising/descending price ordering of the stroke endpoints.
    const bool pivot_ok = s.kind == ShapeKind::Top ? s.pivot_price > last.pivot_price
                                                   : s.pivot_price < last.pivot_price;
    if (bar_count >= 5 && pivot_ok) pivots.push_back(s);
  }

  std::vector<Stroke> strokes;
  if (pivots.size() < 2) return strokes;
  strokes.reserve(pivots.size() - 1);
  for (std::size_t i = 1; i < pivots.size(); ++i) {
    Stroke st;
    st.start = pivots[i - 1];
    st.end = pivots[i];
    st.direction = st.end.kind == ShapeKind::Top ? StrokeDirection::Rising
                                                 : StrokeDirection::Descending;
    strokes.push_back(st);
  }
  return strokes;
}

SpanFeatures stroke_span_features(const Stroke& stroke, const std::vector<MergedBar>& merged,
                                  const BarSeries& source) {
  const std::size_t first = merged[stroke.start.center].span_begin;
  const std::size_t last = merged[stroke.end.center].span_end;
  SpanFeatures f;
  f.open = source[first].open;
  f.close = source[last].close;
  f.high = source[first].high;
  f.low = source[first].low;
  f.volume = 0;
  for (std::size_t i = first; i <= last; ++i) {
    f.high = std::max(f.high, source[i].high);
    f.low = std::min(f.low, source[i].low);
    f.volume += source[i].volume;
  }
  f.trend = stroke.direction == StrokeDirection::Rising ? 1.0 : -1.0;
  return f;
}

void annotate_strokes(std::vector<Stroke>& strokes, const std::vector<MergedBar>& merged,
                      const BarSeries& source) {
  for (Stroke& st : strokes) st.span = stroke_span_features(st, merged, source);
}

ChanResult run_chan(const BarSeries& series, TrendDirection initial) {
  ChanResult r;
  r.merged = remove_inclusions(series, initial);
  r.shapes = detect_shapes(r.merged);
  r.strokes = extract_strokes(r.shapes, r.merged);
  annotate_strokes(r.strokes, r.merged, series);
  return r;
}

StreamingExtractor::StreamingExtractor(TimeScale scale, TrendDirection initial)
    : initial_(initial) {
  series_.scale = scale;
}

void StreamingExtractor::append(const Bar& bar) {
  if (!series_.empty() && bar.timestamp <= series_.bars.back().timestamp) {
    throw OrderError("appended bar does not advance time");
  }
  series_.bars.push_back(bar);
  result_ = run_chan(series_, initial_);
}

std::vector<Stroke> StreamingExtractor::confirmed_strokes() const {
  if (result_.strokes.size() <= 1) return {};
  return std::vector<Stroke>(result_.strokes.begin(), result_.strokes.end() - 1);
}

}  // namespace mss
