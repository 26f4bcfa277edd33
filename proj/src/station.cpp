#include "airq/station.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "airq/csv.hpp"
#include "airq/errors.hpp"

namespace airq {

const std::vector<Pollutant>& all_pollutants() {
    static const std::vector<Pollutant> order = {Pollutant::NO2, Pollutant::O3, Pollutant::PM10,
                                                 Pollutant::PM2_5, Pollutant::SO2};
    return order;
}

std::string to_string(Pollutant p) {
    switch (p) {
        case Pollutant::NO2: return "NO2";
        case Pollutant::O3: return "O3";
        case Pollutant::PM10: return "PM10";
        case Pollutant::PM2_5: return "PM2_5";
        case Pollutant::SO2: return "SO2";
    }
    return "?";
}

std::string to_string(Unit u) { return u == Unit::ug_m3 ? "ug_m3" : "ppb"; }

std::string to_string(Continent c) {
    switch (c) {
        case Continent::Asia: return "Asia";
        case Continent::Australia: return "Australia";
        case Continent::SouthAmerica: return "SouthAmerica";
        case Continent::Africa: return "Africa";
        case Continent::Europe: return "Europe";
        case Continent::NorthAmerica: return "NorthAmerica";
        case Continent::Oceania: return "Oceania";
    }
    return "?";
}

Pollutant pollutant_from_string(const std::string& s) {
    for (Pollutant p : all_pollutants()) {
        if (s == to_string(p)) return p;
    }
    throw ParseError("unknown pollutant: '" + s + "'");
}

Unit unit_from_string(const std::string& s) {
    if (s == "ug_m3") return Unit::ug_m3;
    if (s == "ppb") return Unit::ppb;
    throw ParseError("unknown unit: '" + s + "'");
}

Continent continent_from_string(const std::string& s) {
    static const Continent all[] = {Continent::Asia,   Continent::Australia,
                                    Continent::SouthAmerica, Continent::Africa,
                                    Continent::Europe, Continent::NorthAmerica,
                                    Continent::Oceania};
    for (Continent c : all) {
        if (s == to_string(c)) return c;
    }
    throw ParseError("unknown continent: '" + s + "'");
}

std::string to_string(QcRule r) {
    switch (r) {
        case QcRule::R1_PpbUnit: return "R1";
        case QcRule::R2_TooFewPoints: return "R2";
        case QcRule::R3_DuplicateTimestampDiffers: return "R3";
        case QcRule::R4_ConstantValue: return "R4";
        case QcRule::R5_MissingHourOfDay: return "R5";
        case QcRule::R6_MissingDayOfWeek: return "R6";
    }
    return "?";
}

namespace {

const std::vector<std::string> kStationHeader = {"station_id", "network_id", "country_code",
                                                 "continent",  "lat",        "lon",
                                                 "pollutant",  "unit"};
const std::vector<std::string> kMeasurementHeader = {"station_id", "pollutant", "timestamp_utc",
                                                     "value", "unit"};

void check_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                  const std::string& path) {
    if (got != want) throw ParseError(path + ": unexpected header");
}

[[noreturn]] void row_error(const std::string& path, std::size_t line, const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<StationMeta> parse_station_file(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw ParseError(path + ": empty file");
    check_header(rows[0], kStationHeader, path);

    std::vector<StationMeta> out;
    std::set<std::pair<std::string, Pollutant>> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::size_t line = i + 1;
        if (r.size() != kStationHeader.size()) row_error(path, line, "wrong field count");
        StationMeta m;
        try {
            m.station_id = r[0];
            m.network_id = r[1];
            m.country_code = r[2];
            m.continent = continent_from_string(r[3]);
            m.lat = csv::parse_double(r[4]);
            m.lon = csv::parse_double(r[5]);
            m.pollutant = pollutant_from_string(r[6]);
            m.unit = unit_from_string(r[7]);
        } catch (const ParseError& e) {
            row_error(path, line, e.what());
        }
        if (m.station_id.empty()) row_error(path, line, "empty station_id");
        if (!(m.lat >= -90.0 && m.lat <= 90.0)) {
            throw ValidationError(path + ":" + std::to_string(line) + ": lat out of range");
        }
        if (!(m.lon >= -180.0 && m.lon < 180.0)) {
            throw ValidationError(path + ":" + std::to_string(line) + ": lon out of range");
        }
        if (!seen.insert({m.station_id, m.pollutant}).second) {
            throw ValidationError(path + ":" + std::to_string(line) +
                                  ": duplicate (station_id, pollutant): " + m.station_id);
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<MeasurementSeries> parse_measurement_file(const std::string& path,
                                                      const std::vector<StationMeta>& stations) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw ParseError(path + ": empty file");
    check_header(rows[0], kMeasurementHeader, path);

    std::unordered_map<std::string, std::size_t> index;  // "id|pollutant" -> series slot
    std::vector<MeasurementSeries> out;
    out.reserve(stations.size());
    for (const auto& s : stations) {
        index[s.station_id + "|" + to_string(s.pollutant)] = out.size();
        out.push_back(MeasurementSeries{s, {}});
    }

    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::size_t line = i + 1;
        if (r.size() != kMeasurementHeader.size()) row_error(path, line, "wrong field count");
        const auto it = index.find(r[0] + "|" + r[1]);
        if (it == index.end()) row_error(path, line, "unknown station/pollutant: " + r[0]);
        MeasurementSeries& series = out[it->second];
        Sample s;
        try {
            s.t = parse_rfc3339_hour(r[2]);
            s.value = csv::parse_double(r[3]);
            if (unit_from_string(r[4]) != series.station.unit) {
                row_error(path, line, "unit differs from station metadata");
            }
        } catch (const ParseError& e) {
            row_error(path, line, e.what());
        }
        if (!std::isfinite(s.value) || s.value < 0.0) {
            row_error(path, line, "negative or non-finite concentration");
        }
        series.samples.push_back(s);
    }
    for (auto& series : out) {
        std::stable_sort(series.samples.begin(), series.samples.end(),
                         [](const Sample& a, const Sample& b) { return a.t < b.t; });
    }
    return out;
}

namespace {

// Returns the first violated rule, or nullopt if the series passes. The
// series is normalized in place (identical duplicate timestamps collapsed).
std::optional<QcRejection> check_series(MeasurementSeries& series, const QcRuleSet& rules) {
    const std::string& id = series.station.station_id;

    if (rules.r1_ppb && series.station.unit == Unit::ppb) {
        return QcRejection{id, QcRule::R1_PpbUnit, "unit is ppb"};
    }

    // Collapse duplicate timestamps carrying the same value; only differing
    // values count against R3.
    auto& v = series.samples;
    bool differing_dup = false;
    std::vector<Sample> dedup;
    dedup.reserve(v.size());
    for (const Sample& s : v) {
        if (!dedup.empty() && dedup.back().t == s.t) {
            if (dedup.back().value != s.value) differing_dup = true;
            continue;
        }
        dedup.push_back(s);
    }
    v = std::move(dedup);

    if (rules.r2_min_points && v.size() <= 2) {
        return QcRejection{id, QcRule::R2_TooFewPoints,
                           std::to_string(v.size()) + " data points"};
    }
    if (rules.r3_dup_timestamps && differing_dup) {
        return QcRejection{id, QcRule::R3_DuplicateTimestampDiffers,
                           "repeated timestamp with differing values"};
    }
    if (rules.r4_constant) {
        bool constant = true;
        for (const Sample& s : v) {
            if (s.value != v.front().value) {
                constant = false;
                break;
            }
        }
        if (constant && !v.empty()) {
            return QcRejection{id, QcRule::R4_ConstantValue,
                               "all values equal " + csv::format_double(v.front().value)};
        }
    }
    if (rules.r5_hour_coverage) {
        bool seen[24] = {};
        for (const Sample& s : v) seen[to_civil(s.t).hour] = true;
        for (int h = 0; h < 24; ++h) {
            if (!seen[h]) {
                return QcRejection{id, QcRule::R5_MissingHourOfDay,
                                   "no reading for hour " + std::to_string(h)};
            }
        }
    }
    if (rules.r6_weekday_coverage) {
        bool seen[7] = {};
        for (const Sample& s : v) seen[weekday_from_days(s.t.hours / 24)] = true;
        for (int d = 0; d < 7; ++d) {
            if (!seen[d]) {
                return QcRejection{id, QcRule::R6_MissingDayOfWeek,
                                   "no reading for weekday " + std::to_string(d)};
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::pair<std::vector<MeasurementSeries>, QcReport> apply_qc(
    const std::vector<MeasurementSeries>& series_set, const QcRuleSet& rules) {
    std::vector<MeasurementSeries> kept;
    QcReport report;
    for (const MeasurementSeries& in : series_set) {
        MeasurementSeries s = in;
        std::stable_sort(s.samples.begin(), s.samples.end(),
                         [](const Sample& a, const Sample& b) { return a.t < b.t; });
        if (auto rejection = check_series(s, rules)) {
            report.rejected.push_back(std::move(*rejection));
        } else {
            kept.push_back(std::move(s));
        }
    }
    std::stable_sort(report.rejected.begin(), report.rejected.end(),
                     [](const QcRejection& a, const QcRejection& b) {
                         return a.station_id < b.station_id;
                     });
    report.kept = kept.size();
    return {std::move(kept), std::move(report)};
}

StationSummary station_summary(const MeasurementSeries& series) {
    if (series.samples.empty()) throw ValidationError("station_summary: empty series");
    StationSummary s;
    s.count = series.samples.size();
    s.first = series.samples.front().t;
    s.last = series.samples.back().t;
    s.min = s.max = series.samples.front().value;
    double sum = 0.0;
    std::set<double> distinct;
    for (const Sample& x : series.samples) {
        s.min = std::min(s.min, x.value);
        s.max = std::max(s.max, x.value);
        sum += x.value;
        distinct.insert(x.value);
    }
    s.mean = sum / static_cast<double>(s.count);
    s.distinct = distinct.size();
    return s;
}

void write_qc_report(const QcReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "station_id,rule_id,detail\n";
    for (const auto& r : report.rejected) {
        out << csv::join_record({r.station_id, to_string(r.rule), r.detail}) << "\n";
    }
}

}  // namespace airq
