#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rnr::timeutil {

// All timestamps in the library are UTC epoch seconds (int64).
// Conversions are locale-free and deterministic.

// Parses "YYYY-MM-DDTHH:MM:SSZ" (the normalized record format).
// Throws DataError on anything else.
std::int64_t parse_iso8601(std::string_view text);

// Formats epoch seconds as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(std::int64_t epoch_seconds);

// Parses the Twitter API format "Wed Jan 07 11:06:08 +0000 2015".
// The numeric offset is honored (subtracted to yield UTC).
std::int64_t parse_twitter_time(std::string_view text);

// Fractional years between two instants, using 365.25-day years.
double years_between(std::int64_t from_epoch, std::int64_t to_epoch);

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(std::int64_t year, unsigned month, unsigned day);

}  // namespace rnr::timeutil
