#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mss {

// One OHLCV candlestick. `timestamp` is the bar close time (UTC seconds).
struct Bar {
  std::int64_t timestamp = 0;
  double open = 0;
  double high = 0;
  double low = 0;
  double close = 0;
  double volume = 0;
};

// Returns an empty string when the bar satisfies its invariants, otherwise a
// short description of the violation.
std::string check_bar(const Bar& b);

class TimeScale {
 public:
  enum class Kind { Minutes, Day, Week, Month };

  static TimeScale min10() { return TimeScale(Kind::Minutes, 10); }
  static TimeScale minutes(int n);
  static TimeScale day() { return TimeScale(Kind::Day, 0); }
  static TimeScale week() { return TimeScale(Kind::Week, 0); }
  static TimeScale month() { return TimeScale(Kind::Month, 0); }

  Kind kind() const { return kind_; }
  int minutes_count() const { return minutes_; }

  // Nominal bucket length in seconds; defines the coarseness order
  // min10 < day < week < month.
  std::int64_t approx_seconds() const;
  bool coarser_than(const TimeScale& other) const {
    return approx_seconds() > other.approx_seconds();
  }

  std::string name() const;                       // "min10", "day", "week", "month"
  static TimeScale parse(const std::string& name);

  bool operator==(const TimeScale& o) const {
    return kind_ == o.kind_ && minutes_ == o.minutes_;
  }
  bool operator!=(const TimeScale& o) const { return !(*this == o); }

  std::int64_t bucket_key(std::int64_t ts) const;

 private:
  TimeScale(Kind k, int m) : kind_(k), minutes_(m) {}
  Kind kind_;
  int minutes_;
};

// Immutable after load; timestamps strictly increasing.
struct BarSeries {
  TimeScale scale = TimeScale::day();
  std::vector<Bar> bars;

  std::size_t size() const { return bars.size(); }
  bool empty() const { return bars.empty(); }
  const Bar& operator[](std::size_t i) const { return bars[i]; }
};

// CSV with header `timestamp,open,high,low,close,volume`; one bar per line.
BarSeries load_csv(const std::string& path, TimeScale scale);
void save_csv(const BarSeries& series, const std::string& path);

// Aggregates into target buckets: open = first open, close = last close,
// high = max, low = min, volume = sum; bucket timestamp = last source bar's.
// `target` must not be finer than the series scale (ScaleError otherwise);
// an equal-scale resample regroups into the same buckets and is a content
// no-op, which keeps resampling idempotent.
BarSeries resample(const BarSeries& series, TimeScale target);

struct SynthSpec {
  enum class Kind { Sine, Trend, RandomWalk };
  Kind kind = Kind::RandomWalk;
  std::size_t length = 500;
  std::uint64_t seed = 1;

  // sine: close_t = offset + amplitude * sin(2*pi*t / period)
  double offset = 100.0;
  double amplitude = 10.0;
  double period = 50.0;
  // trend: close_t = offset + slope * t
  double slope = 0.0;
  // random walk: log-return steps N(drift, sigma^2) from `offset`
  double sigma = 0.01;
  double drift = 0.0;

  double range_frac = 0.004;    // intrabar high/low margin around open/close
  double base_volume = 10000.0;
  std::int64_t start_ts = 946857600;  // 2000-01-03T00:00:00Z (a Monday)
  std::int64_t step_seconds = 86400;
  TimeScale scale = TimeScale::day();
};

// Deterministic fixture generator; same spec -> identical series.
BarSeries synth_series(const SynthSpec& spec);

// Bars [begin, end) at the same scale; IndexError on an invalid range.
BarSeries slice_series(const BarSeries& series, std::size_t begin, std::size_t end);

}  // namespace mss
