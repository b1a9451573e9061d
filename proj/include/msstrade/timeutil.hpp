#pragma once

#include <cstdint>
#include <string>

namespace mss {

// All timestamps are UTC seconds since the Unix epoch.

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
};

// Days since 1970-01-01 for a civil date (proleptic Gregorian), and back.
std::int64_t days_from_civil(const CivilDate& d);
CivilDate civil_from_days(std::int64_t days);

// Accepts "YYYY-MM-DD", "YYYY-MM-DD HH:MM[:SS]" and RFC 3339
// "YYYY-MM-DDTHH:MM:SS[Z]". Throws FormatError on anything else.
std::int64_t parse_timestamp(const std::string& text);

// RFC 3339 with Z suffix, e.g. "2000-01-03T00:00:00Z".
std::string format_timestamp(std::int64_t ts);

// Bucket keys used by resampling. Keys are monotone in the timestamp.
std::int64_t day_key(std::int64_t ts);                  // civil day index
std::int64_t week_key(std::int64_t ts);                 // Monday of the ISO week
std::int64_t month_key(std::int64_t ts);                // year*12 + month-1
std::int64_t minutes_key(std::int64_t ts, int minutes); // close-time buckets

}  // namespace mss
