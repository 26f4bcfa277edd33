#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "airq/time.hpp"

namespace airq {

enum class Pollutant { NO2, O3, PM10, PM2_5, SO2 };
enum class Unit { ug_m3, ppb };
enum class Continent { Asia, Australia, SouthAmerica, Africa, Europe, NorthAmerica, Oceania };

constexpr int kNumPollutants = 5;

// Fixed pollutant order, also the tie-break order for the driving-subindex map.
const std::vector<Pollutant>& all_pollutants();

std::string to_string(Pollutant p);
std::string to_string(Unit u);
std::string to_string(Continent c);
Pollutant pollutant_from_string(const std::string& s);
Unit unit_from_string(const std::string& s);
Continent continent_from_string(const std::string& s);

struct StationMeta {
    std::string station_id;
    std::string network_id;
    std::string country_code;  // ISO-3166 alpha-2
    Continent continent = Continent::Europe;
    double lat = 0.0;  // [-90, 90]
    double lon = 0.0;  // [-180, 180)
    Pollutant pollutant = Pollutant::NO2;
    Unit unit = Unit::ug_m3;
};

struct Sample {
    UtcHour t;
    double value = 0.0;  // ug/m3, >= 0
};

struct MeasurementSeries {
    StationMeta station;
    std::vector<Sample> samples;  // sorted by timestamp after QC
};

// QC rules, checked in fixed order R1..R6.
enum class QcRule : int {
    R1_PpbUnit = 1,
    R2_TooFewPoints = 2,
    R3_DuplicateTimestampDiffers = 3,
    R4_ConstantValue = 4,
    R5_MissingHourOfDay = 5,
    R6_MissingDayOfWeek = 6,
};

std::string to_string(QcRule r);

struct QcRuleSet {
    bool r1_ppb = true;
    bool r2_min_points = true;
    bool r3_dup_timestamps = true;
    bool r4_constant = true;
    bool r5_hour_coverage = true;
    bool r6_weekday_coverage = true;

    static QcRuleSet all() { return {}; }
};

struct QcRejection {
    std::string station_id;
    QcRule rule;
    std::string detail;
};

struct QcReport {
    std::size_t kept = 0;
    std::vector<QcRejection> rejected;  // sorted by station_id
};

struct StationSummary {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::size_t distinct = 0;
    UtcHour first;
    UtcHour last;
};

// stations.csv: station_id,network_id,country_code,continent,lat,lon,pollutant,unit
std::vector<StationMeta> parse_station_file(const std::string& path);

// measurements.csv: station_id,pollutant,timestamp_utc,value,unit
// Rows are grouped into one series per (station_id, pollutant) found in
// `stations`; rows for unknown stations are a parse error. Negative values
// and sub-hourly timestamps are malformed rows. Samples are sorted by
// timestamp; duplicate timestamps are preserved for QC to inspect.
std::vector<MeasurementSeries> parse_measurement_file(const std::string& path,
                                                      const std::vector<StationMeta>& stations);

// Applies the enabled rules in order R1..R6. Rejections carry the first rule
// violated. Kept series are normalized: sorted, identical-value duplicate
// timestamps collapsed to one sample.
std::pair<std::vector<MeasurementSeries>, QcReport> apply_qc(
    const std::vector<MeasurementSeries>& series_set, const QcRuleSet& rules);

// Throws ValidationError on an empty series.
StationSummary station_summary(const MeasurementSeries& series);

void write_qc_report(const QcReport& report, const std::string& path);

}  // namespace airq
