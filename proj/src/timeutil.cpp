#include "msstrade/timeutil.hpp"

#include <cctype>
#include <cstdio>

#include "msstrade/errors.hpp"

namespace mss {

namespace {

// Floor division / modulo that behave for negative values too.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
  if (from + count > s.size()) return false;
  for (std::size_t i = from; i < from + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

int to_int(const std::string& s, std::size_t from, std::size_t count) {
  int v = 0;
  for (std::size_t i = from; i < from + count; ++i) v = v * 10 + (s[i] - '0');
  return v;
}

}  // namespace

std::int64_t days_from_civil(const CivilDate& d) {
  // Howard Hinnant's civil calendar algorithm.
  std::int64_t y = d.year;
  unsigned m = static_cast<unsigned>(d.month);
  unsigned day = static_cast<unsigned>(d.day);
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t days) {
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned day = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  CivilDate out;
  out.year = static_cast<int>(y + (m <= 2));
  out.month = static_cast<int>(m);
  out.day = static_cast<int>(day);
  return out;
}

std::int64_t parse_timestamp(const std::string& text) {
  std::string s = text;
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  s = s.substr(b);

  if (!all_digits(s, 0, 4) || s.size() < 10 || s[4] != '-' || s[7] != '-' ||
      !all_digits(s, 5, 2) || !all_digits(s, 8, 2)) {
    throw FormatError("bad timestamp: '" + text + "'");
  }
  CivilDate d;
  d.year = to_int(s, 0, 4);
  d.month = to_int(s, 5, 2);
  d.day = to_int(s, 8, 2);
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
    throw FormatError("bad date: '" + text + "'");
  }
  if (const CivilDate rt = civil_from_days(days_from_civil(d));
      rt.year != d.year || rt.month != d.month || rt.day != d.day) {
    throw FormatError("bad date: '" + text + "'");  // e.g. feb 30 must not roll over
  }

  int hh = 0, mm = 0, ss = 0;
  if (s.size() > 10) {
    if (s[10] != ' ' && s[10] != 'T') throw FormatError("bad timestamp: '" + text + "'");
    if (s.size() < 16 || s[13] != ':' || !all_digits(s, 11, 2) || !all_digits(s, 14, 2)) {
      throw FormatError("bad timestamp: '" + text + "'");
    }
    hh = to_int(s, 11, 2);
    mm = to_int(s, 14, 2);
    std::size_t rest = 16;
    if (s.size() > rest && s[rest] == ':') {
      if (!all_digits(s, rest + 1, 2)) throw FormatError("bad timestamp: '" + text + "'");
      ss = to_int(s, rest + 1, 2);
      rest += 3;
    }
    if (s.size() > rest) {
      if (!(s.size() == rest + 1 && s[rest] == 'Z')) {
        throw FormatError("bad timestamp: '" + text + "'");
      }
    }
    if (hh > 23 || mm > 59 || ss > 60) throw FormatError("bad time: '" + text + "'");
  }
  return days_from_civil(d) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(std::int64_t ts) {
  const std::int64_t days = floor_div(ts, 86400);
  const std::int64_t sec = floor_mod(ts, 86400);
  const CivilDate d = civil_from_days(days);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                static_cast<int>(sec / 3600), static_cast<int>((sec / 60) % 60),
                static_cast<int>(sec % 60));
  return buf;
}

std::int64_t day_key(std::int64_t ts) { return floor_div(ts, 86400); }

std::int64_t week_key(std::int64_t ts) {
  const std::int64_t days = day_key(ts);
  // 1970-01-01 was a Thursday; shift so Monday == 0.
  const std::int64_t dow = floor_mod(days + 3, 7);
  return days - dow;
}

std::int64_t month_key(std::int64_t ts) {
  const CivilDate d = civil_from_days(day_key(ts));
  return static_cast<std::int64_t>(d.year) * 12 + (d.month - 1);
}

std::int64_t minutes_key(std::int64_t ts, int minutes) {
  // Bars carry close times, so a close exactly on a bucket boundary belongs
  // to the bucket that just ended.
  return floor_div(ts - 1, static_cast<std::int64_t>(minutes) * 60);
}

}  // namespace mss
