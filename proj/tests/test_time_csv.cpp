#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "airq/csv.hpp"
#include "airq/errors.hpp"
#include "airq/time.hpp"

using namespace airq;

TEST_CASE("civil round trip across a wide year range") {
    for (int y : {1970, 1999, 2000, 2020, 2022, 2024, 2100}) {
        for (int m = 1; m <= 12; ++m) {
            const std::int64_t z = days_from_civil(y, m, 15);
            int yy, mm, dd;
            civil_from_days(z, yy, mm, dd);
            CHECK(yy == y);
            CHECK(mm == m);
            CHECK(dd == 15);
        }
    }
}

TEST_CASE("weekday: 2022-01-01 was a Saturday, 2022-06-15 a Wednesday") {
    CHECK(weekday_from_days(days_from_civil(2022, 1, 1)) == 5);
    CHECK(weekday_from_days(days_from_civil(2022, 6, 15)) == 2);
    CHECK(weekday_from_days(0) == 3);  // 1970-01-01, Thursday
}

TEST_CASE("ISO week numbers at year boundaries") {
    CHECK(iso_week_number(2022, 6, 15) == 24);
    CHECK(iso_week_number(2022, 1, 1) == 52);   // belongs to 2021-W52
    CHECK(iso_week_number(2021, 1, 1) == 53);   // 2020 had 53 ISO weeks
    CHECK(iso_week_number(2022, 1, 3) == 1);    // first Monday of 2022
    CHECK(iso_week_number(2022, 12, 31) == 52);
}

TEST_CASE("rfc3339 parse and format round trip") {
    const UtcHour t = parse_rfc3339_hour("2022-06-15T08:00:00Z");
    CHECK(format_rfc3339(t) == "2022-06-15T08:00:00Z");
    const CivilDateTime c = to_civil(t);
    CHECK(c.year == 2022);
    CHECK(c.month == 6);
    CHECK(c.day == 15);
    CHECK(c.hour == 8);

    CHECK_THROWS_AS(parse_rfc3339_hour("2022-06-15T08:30:00Z"), ParseError);  // sub-hourly
    CHECK_THROWS_AS(parse_rfc3339_hour("2022-06-15 08:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_rfc3339_hour("2022-13-15T08:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_rfc3339_hour("garbage"), ParseError);
}

TEST_CASE("csv record split handles quoting") {
    CHECK(csv::split_record("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(csv::split_record("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
    CHECK(csv::split_record("\"he said \"\"hi\"\"\",x") ==
          std::vector<std::string>{"he said \"hi\"", "x"});
    CHECK(csv::split_record("a,,c") == std::vector<std::string>{"a", "", "c"});
}

TEST_CASE("join then split is the identity") {
    const std::vector<std::string> fields = {"plain", "with,comma", "with\"quote", " padded "};
    CHECK(csv::split_record(csv::join_record(fields)) == fields);
}

TEST_CASE("format_double round trips exactly") {
    for (double v : {0.0, 1.0 / 3.0, -2.5e-7, 1e300, 123456.789, -0.1}) {
        CHECK(csv::parse_double(csv::format_double(v)) == v);
    }
}

TEST_CASE("strict numeric parsing") {
    CHECK(csv::parse_double("1.5") == 1.5);
    CHECK_THROWS_AS(csv::parse_double("1.5x"), ParseError);
    CHECK_THROWS_AS(csv::parse_double(""), ParseError);
    CHECK(csv::parse_int("-42") == -42);
    CHECK_THROWS_AS(csv::parse_int("4.2"), ParseError);
    CHECK_THROWS_AS(csv::parse_uint("-1"), ParseError);
}
