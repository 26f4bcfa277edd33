#include "airq/time.hpp"

#include <array>
#include <cstdio>

#include "airq/errors.hpp"

namespace airq {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);             // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;            // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
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

int weekday_from_days(std::int64_t z) {
    // 1970-01-01 was a Thursday (3 with Monday = 0).
    return static_cast<int>(z >= -3 ? (z + 3) % 7 : (z + 4) % 7 + 6);
}

CivilDateTime to_civil(UtcHour t) {
    std::int64_t days = t.hours / 24;
    int hour = static_cast<int>(t.hours % 24);
    if (hour < 0) {
        hour += 24;
        days -= 1;
    }
    CivilDateTime c;
    c.hour = hour;
    civil_from_days(days, c.year, c.month, c.day);
    return c;
}

UtcHour from_civil(const CivilDateTime& c) {
    return UtcHour{days_from_civil(c.year, c.month, c.day) * 24 + c.hour};
}

int iso_week_number(int year, int month, int day) {
    const std::int64_t z = days_from_civil(year, month, day);
    // Thursday of this date's week determines the ISO year/week.
    const std::int64_t thursday = z - weekday_from_days(z) + 3;
    int ty, tm, td;
    civil_from_days(thursday, ty, tm, td);
    const std::int64_t jan1 = days_from_civil(ty, 1, 1);
    return static_cast<int>((thursday - jan1) / 7) + 1;
}

UtcHour parse_rfc3339_hour(const std::string& s) {
    // Expected form: YYYY-MM-DDTHH:MM:SSZ (20 chars).
    int y, mo, d, h, mi, se;
    char t, zulu;
    if (s.size() != 20 ||
        std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%c", &y, &mo, &d, &t, &h, &mi, &se,
                    &zulu) != 8 ||
        (t != 'T' && t != 't') || (zulu != 'Z' && zulu != 'z')) {
        throw ParseError("bad RFC-3339 timestamp: '" + s + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || se < 0) {
        throw ParseError("out-of-range timestamp field: '" + s + "'");
    }
    if (mi != 0 || se != 0) {
        throw ParseError("timestamp not hour-aligned: '" + s + "'");
    }
    return UtcHour{days_from_civil(y, mo, d) * 24 + h};
}

std::string format_rfc3339(UtcHour t) {
    const CivilDateTime c = to_civil(t);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", c.year, c.month, c.day, c.hour);
    return buf;
}

}  // namespace airq
