#include "msstrade/bars.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "msstrade/errors.hpp"
#include "msstrade/timeutil.hpp"

namespace mss {

namespace {
constexpr const char* kCsvHeader = "timestamp,open,high,low,close,volume";

double parse_price(const std::string& field, std::size_t row, const char* what) {
  const char* begin = field.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw DataError(std::string("unparsable ") + what + " '" + field + "'", row);
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}
}  // namespace

std::string check_bar(const Bar& b) {
  if (!(b.low <= b.high)) return "low > high";
  if (!(b.low <= std::min(b.open, b.close))) return "low above open/close";
  if (!(b.high >= std::max(b.open, b.close))) return "high below open/close";
  if (!(b.volume >= 0)) return "negative volume";
  return "";
}

TimeScale TimeScale::minutes(int n) {
  if (n <= 0) throw SpecError("minute scale needs a positive count");
  return TimeScale(Kind::Minutes, n);
}

std::int64_t TimeScale::approx_seconds() const {
  switch (kind_) {
    case Kind::Minutes: return static_cast<std::int64_t>(minutes_) * 60;
    case Kind::Day: return 86400;
    case Kind::Week: return 604800;
    case Kind::Month: return 2629800;  // ~30.44 days, only used for ordering
  }
  return 0;
}

std::string TimeScale::name() const {
  switch (kind_) {
    case Kind::Minutes: return "min" + std::to_string(minutes_);
    case Kind::Day: return "day";
    case Kind::Week: return "week";
    case Kind::Month: return "month";
  }
  return "?";
}

TimeScale TimeScale::parse(const std::string& name) {
  if (name == "day") return day();
  if (name == "week") return week();
  if (name == "month") return month();
  if (name.rfind("min", 0) == 0 && name.size() > 3) {
    int n = std::atoi(name.c_str() + 3);
    if (n > 0) return minutes(n);
  }
  throw ConfigError("unknown time scale '" + name + "'");
}

std::int64_t TimeScale::bucket_key(std::int64_t ts) const {
  switch (kind_) {
    case Kind::Minutes: return minutes_key(ts, minutes_);
    case Kind::Day: return day_key(ts);
    case Kind::Week: return week_key(ts);
    case Kind::Month: return month_key(ts);
  }
  return 0;
}

BarSeries load_csv(const std::string& path, TimeScale scale) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty file '" + path + "'");
  while (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw FormatError("bad header '" + line + "', expected '" + kCsvHeader + "'");
  }

  BarSeries series;
  series.scale = scale;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    auto fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw FormatError("expected 6 columns, got " + std::to_string(fields.size()) +
                        " (row " + std::to_string(row) + ")");
    }
    Bar b;
    try {
      b.timestamp = parse_timestamp(fields[0]);
    } catch (const FormatError& e) {
      throw DataError(e.what(), row);
    }
    b.open = parse_price(fields[1], row, "open");
    b.high = parse_price(fields[2], row, "high");
    b.low = parse_price(fields[3], row, "low");
    b.close = parse_price(fields[4], row, "close");
    b.volume = parse_price(fields[5], row, "volume");
    if (std::string why = check_bar(b); !why.empty()) throw DataError(why, row);
    if (!series.bars.empty() && b.timestamp <= series.bars.back().timestamp) {
      throw OrderError("non-monotonic timestamp at row " + std::to_string(row));
    }
    series.bars.push_back(b);
  }
  return series;
}

void save_csv(const BarSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << kCsvHeader << "\n";
  for (const Bar& b : series.bars) {
    out << format_timestamp(b.timestamp) << ',' << fmt_value(b.open) << ',' << fmt_value(b.high)
        << ',' << fmt_value(b.low) << ',' << fmt_value(b.close) << ',' << fmt_value(b.volume)
        << "\n";
  }
}

BarSeries resample(const BarSeries& series, TimeScale target) {
  if (series.scale.coarser_than(target)) {
    throw ScaleError("cannot resample " + series.scale.name() + " down to " + target.name());
  }
  BarSeries out;
  out.scale = target;
  if (series.empty()) return out;

  Bar acc = series.bars.front();
  std::int64_t key = target.bucket_key(acc.timestamp);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const Bar& b = series.bars[i];
    const std::int64_t k = target.bucket_key(b.timestamp);
    if (k == key) {
      acc.high = std::max(acc.high, b.high);
      acc.low = std::min(acc.low, b.low);
      acc.close = b.close;
      acc.volume += b.volume;
      acc.timestamp = b.timestamp;
    } else {
      out.bars.push_back(acc);
      acc = b;
      key = k;
    }
  }
  out.bars.push_back(acc);
  return out;
}

BarSeries synth_series(const SynthSpec& spec) {
  if (spec.length == 0) throw SpecError("synth length must be >= 1");
  if (spec.range_frac <= 0) throw SpecError("range_frac must be positive");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  BarSeries series;
  series.scale = spec.scale;
  series.bars.reserve(spec.length);

  double prev_close = 0;
  for (std::size_t t = 0; t < spec.length; ++t) {
    double close = 0;
    switch (spec.kind) {
      case SynthSpec::Kind::Sine:
        close = spec.offset + spec.amplitude * std::sin(2.0 * M_PI * static_cast<double>(t) /
                                                        spec.period);
        break;
      case SynthSpec::Kind::Trend:
        close = spec.offset + spec.slope * static_cast<double>(t);
        break;
      case SynthSpec::Kind::RandomWalk:
        close = (t == 0) ? spec.offset : prev_close * std::exp(spec.drift + spec.sigma * gauss(rng));
        break;
    }
    if (!(close > 0)) throw SpecError("synth spec produced a non-positive price");

    Bar b;
    b.timestamp = spec.start_ts + static_cast<std::int64_t>(t) * spec.step_seconds;
    b.open = (t == 0) ? close : prev_close;
    b.close = close;
    // Trend keeps deterministic wicks (the degenerate fixture kind); walk and
    // sine draw seeded wick extents so adjacent bars never tie exactly on
    // high/low, which would otherwise defeat the strict fractal inequalities.
    double up = 1.0, down = 1.0;
    if (spec.kind != SynthSpec::Kind::Trend) {
      up = 0.25 + 1.5 * unit(rng);
      down = 0.25 + 1.5 * unit(rng);
    }
    b.high = std::max(b.open, b.close) * (1.0 + spec.range_frac * up);
    b.low = std::min(b.open, b.close) * (1.0 - spec.range_frac * down);
    b.volume = spec.base_volume * (0.8 + 0.4 * unit(rng));
    series.bars.push_back(b);
    prev_close = close;
  }
  return series;
}

BarSeries slice_series(const BarSeries& series, std::size_t begin, std::size_t end) {
  if (begin > end || end > series.bars.size()) throw IndexError("slice range invalid");
  BarSeries out;
  out.scale = series.scale;
  out.bars.assign(series.bars.begin() + static_cast<std::ptrdiff_t>(begin),
                  series.bars.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace mss
