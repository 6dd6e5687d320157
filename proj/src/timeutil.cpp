#include "rnr/timeutil.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "rnr/errors.hpp"

namespace rnr::timeutil {

namespace {

[[noreturn]] void bad_time(std::string_view text, const char* why) {
    throw DataError("unparseable timestamp \"" + std::string(text) + "\": " + why);
}

// Parses exactly `width` digits starting at text[pos].
int fixed_digits(std::string_view text, std::size_t pos, std::size_t width) {
    if (pos + width > text.size()) bad_time(text, "truncated");
    int value = 0;
    for (std::size_t i = pos; i < pos + width; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') bad_time(text, "expected digit");
        value = value * 10 + (c - '0');
    }
    return value;
}

bool leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr std::array<unsigned, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                       31, 31, 30, 31, 30, 31};
    if (m == 2 && leap(y)) return 29;
    return kDays[m - 1];
}

struct Civil {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

// Inverse of days_from_civil (Howard Hinnant's algorithm).
Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
    return {y + (m <= 2), m, d};
}

std::int64_t epoch_from_fields(std::string_view text, std::int64_t year, unsigned month,
                               unsigned day, int hour, int minute, int second) {
    if (month < 1 || month > 12) bad_time(text, "month out of range");
    if (day < 1 || day > days_in_month(year, month)) bad_time(text, "day out of range");
    if (hour > 23 || minute > 59 || second > 59) bad_time(text, "time out of range");
    return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

int month_from_name(std::string_view text, std::string_view name) {
    static constexpr std::array<std::string_view, 12> kNames = {
        "Jan", "Feb", "Mar", "Apr", "May", "Jun",
        "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (name == kNames[i]) return static_cast<int>(i) + 1;
    }
    bad_time(text, "unknown month name");
}

}  // namespace

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::int64_t parse_iso8601(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SSZ, exactly.
    if (text.size() != 20) bad_time(text, "expected YYYY-MM-DDTHH:MM:SSZ");
    if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z') {
        bad_time(text, "expected YYYY-MM-DDTHH:MM:SSZ");
    }
    const int year = fixed_digits(text, 0, 4);
    const int month = fixed_digits(text, 5, 2);
    const int day = fixed_digits(text, 8, 2);
    const int hour = fixed_digits(text, 11, 2);
    const int minute = fixed_digits(text, 14, 2);
    const int second = fixed_digits(text, 17, 2);
    return epoch_from_fields(text, year, static_cast<unsigned>(month),
                             static_cast<unsigned>(day), hour, minute, second);
}

std::string format_iso8601(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const Civil c = civil_from_days(days);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(c.year), c.month, c.day,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::int64_t parse_twitter_time(std::string_view text) {
    // "Wed Jan 07 11:06:08 +0000 2015"
    if (text.size() != 30) bad_time(text, "expected Twitter created_at format");
    if (text[3] != ' ' || text[7] != ' ' || text[10] != ' ' || text[19] != ' ' ||
        text[25] != ' ' || text[13] != ':' || text[16] != ':') {
        bad_time(text, "expected Twitter created_at format");
    }
    const int month = month_from_name(text, text.substr(4, 3));
    const int day = fixed_digits(text, 8, 2);
    const int hour = fixed_digits(text, 11, 2);
    const int minute = fixed_digits(text, 14, 2);
    const int second = fixed_digits(text, 17, 2);
    const char sign = text[20];
    if (sign != '+' && sign != '-') bad_time(text, "expected UTC offset");
    const int off_hours = fixed_digits(text, 21, 2);
    const int off_minutes = fixed_digits(text, 23, 2);
    const int year = fixed_digits(text, 26, 4);

    std::int64_t offset = off_hours * 3600 + off_minutes * 60;
    if (sign == '-') offset = -offset;
    const std::int64_t local = epoch_from_fields(text, year, static_cast<unsigned>(month),
                                                 static_cast<unsigned>(day), hour, minute, second);
    return local - offset;
}

double years_between(std::int64_t from_epoch, std::int64_t to_epoch) {
    return static_cast<double>(to_epoch - from_epoch) / (365.25 * 86400.0);
}

}  // namespace rnr::timeutil
