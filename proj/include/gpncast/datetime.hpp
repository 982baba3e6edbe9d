#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "gpncast/common.hpp"

namespace gpncast {

/// Civil UTC timestamp. The corpus uses "YYYY-MM-DDTHH:MM:SSZ" only, so no
/// timezone handling is needed beyond treating everything as UTC.
struct DateTime {
    int year = 1970;
    int month = 1;   // 1..12
    int day = 1;     // 1..31
    int hour = 0;    // 0..23
    int minute = 0;
    int second = 0;

    friend bool operator==(const DateTime&, const DateTime&) = default;
};

namespace detail {

/// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
inline std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

inline bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

inline int days_in_month(int y, int m) {
    static const int lens[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lens[m - 1];
}

}  // namespace detail

/// Seconds since the Unix epoch.
inline std::int64_t to_epoch_seconds(const DateTime& dt) {
    return detail::days_from_civil(dt.year, dt.month, dt.day) * 86400 +
           dt.hour * 3600 + dt.minute * 60 + dt.second;
}

inline DateTime from_epoch_seconds(std::int64_t t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    DateTime dt;
    detail::civil_from_days(days, dt.year, dt.month, dt.day);
    dt.hour = static_cast<int>(rem / 3600);
    dt.minute = static_cast<int>((rem % 3600) / 60);
    dt.second = static_cast<int>(rem % 60);
    return dt;
}

inline DateTime add_seconds(const DateTime& dt, std::int64_t s) {
    return from_epoch_seconds(to_epoch_seconds(dt) + s);
}

/// 0=Sunday .. 6=Saturday.
inline int day_of_week(const DateTime& dt) {
    const std::int64_t z = detail::days_from_civil(dt.year, dt.month, dt.day);
    return static_cast<int>(((z % 7) + 11) % 7);  // 1970-01-01 was a Thursday
}

/// Weekend means the peak play window: Friday, Saturday, or Sunday.
inline bool is_weekend(const DateTime& dt) {
    const int dow = day_of_week(dt);
    return dow == 5 || dow == 6 || dow == 0;
}

inline bool validate_datetime(const DateTime& dt) {
    if (dt.month < 1 || dt.month > 12) return false;
    if (dt.day < 1 || dt.day > detail::days_in_month(dt.year, dt.month)) return false;
    if (dt.hour < 0 || dt.hour > 23) return false;
    if (dt.minute < 0 || dt.minute > 59) return false;
    if (dt.second < 0 || dt.second > 59) return false;
    return true;
}

/// Parse "YYYY-MM-DDTHH:MM:SSZ". Throws ValidationError on any deviation.
inline DateTime parse_datetime(std::string_view s) {
    const std::string t = trim(s);
    DateTime dt;
    const auto fail = [&] {
        throw ValidationError("bad timestamp: '" + t + "'");
    };
    if (t.size() != 20 || t[4] != '-' || t[7] != '-' || t[10] != 'T' ||
        t[13] != ':' || t[16] != ':' || t[19] != 'Z')
        fail();
    const auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (t[i] < '0' || t[i] > '9') fail();
            v = v * 10 + (t[i] - '0');
        }
        return v;
    };
    dt.year = num(0, 4);
    dt.month = num(5, 2);
    dt.day = num(8, 2);
    dt.hour = num(11, 2);
    dt.minute = num(14, 2);
    dt.second = num(17, 2);
    if (!validate_datetime(dt)) fail();
    return dt;
}

inline std::string format_datetime(const DateTime& dt) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", dt.year,
                  dt.month, dt.day, dt.hour, dt.minute, dt.second);
    return buf;
}

/// "YYYY-MM-DD" date key used by the calendar dimension.
inline std::string format_date(const DateTime& dt) {
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", dt.year, dt.month, dt.day);
    return buf;
}

inline DateTime parse_date(std::string_view s) {
    const std::string t = trim(s);
    if (t.size() != 10) throw ValidationError("bad date: '" + t + "'");
    return parse_datetime(t + "T00:00:00Z");
}

}  // namespace gpncast
