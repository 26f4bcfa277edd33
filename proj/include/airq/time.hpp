#pragma once
#include <cstdint>
#include <string>

namespace airq {

// Hour-aligned UTC instant, stored as whole hours since the Unix epoch.
// All pipeline timestamps are hour-aligned; sub-hourly inputs are rejected
// at parse time.
struct UtcHour {
    std::int64_t hours = 0;

    friend auto operator<=>(const UtcHour&, const UtcHour&) = default;

    UtcHour plus_hours(std::int64_t n) const { return UtcHour{hours + n}; }
};

struct CivilDateTime {
    int year = 1970;
    int month = 1;   // 1..12
    int day = 1;     // 1..31
    int hour = 0;    // 0..23
};

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(int y, int m, int d);

// Inverse of days_from_civil.
void civil_from_days(std::int64_t z, int& y, int& m, int& d);

// 0 = Monday .. 6 = Sunday.
int weekday_from_days(std::int64_t z);

CivilDateTime to_civil(UtcHour t);
UtcHour from_civil(const CivilDateTime& c);

// ISO-8601 week number, 1..53 (week 1 contains the first Thursday of the year).
int iso_week_number(int year, int month, int day);

// Parses "YYYY-MM-DDTHH:MM:SSZ". Minutes and seconds must be zero.
// Throws ParseError otherwise.
UtcHour parse_rfc3339_hour(const std::string& s);

// Formats as "YYYY-MM-DDTHH:00:00Z".
std::string format_rfc3339(UtcHour t);

}  // namespace airq
