#include "airq/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "airq/csv.hpp"
#include "airq/errors.hpp"

namespace airq {

const std::array<std::string, kNumFeatures>& feature_names() {
    static const std::array<std::string, kNumFeatures> names = {
        "hour",
        "day_of_week",
        "week_number",
        "month",
        "utc_offset_hours",
        "u100",
        "v100",
        "u10",
        "v10",
        "dewpoint_2m",
        "temp_2m",
        "boundary_layer_height",
        "downward_uv",
        "wind_gust_10m",
        "surface_pressure",
        "total_column_rain_water",
        "rs_no2",
        "rs_o3",
        "rs_so2",
        "rs_aai",
        "em_co",
        "em_nox",
        "em_nmvoc",
        "em_other_voc",
        "em_so2",
        "em_biogenic_co",
    };
    return names;
}

int feature_index(const std::string& name) {
    const auto& names = feature_names();
    for (int i = 0; i < kNumFeatures; ++i) {
        if (names[i] == name) return i;
    }
    return -1;
}

TemporalFeatures temporal_features(UtcHour t, int offset_hours) {
    const CivilDateTime c = to_civil(t);
    TemporalFeatures f;
    f.hour = c.hour;
    f.day_of_week = weekday_from_days(days_from_civil(c.year, c.month, c.day));
    f.week_number = iso_week_number(c.year, c.month, c.day);
    f.month = c.month;
    f.utc_offset = offset_hours;
    return f;
}

int utc_offset_from_longitude(double lon) {
    if (!(lon >= -180.0 && lon < 180.0)) {
        throw ValidationError("longitude out of range: " + csv::format_double(lon));
    }
    const double raw = lon / 15.0;
    const int rounded = static_cast<int>(raw >= 0.0 ? std::floor(raw + 0.5) : std::ceil(raw - 0.5));
    return std::clamp(rounded, -12, 14);
}

std::array<std::optional<double>, 12> monthly_average(
    const std::vector<std::pair<UtcHour, std::optional<double>>>& series) {
    std::array<double, 12> sum{};
    std::array<std::size_t, 12> count{};
    for (const auto& [t, v] : series) {
        if (!v) continue;
        const int m = to_civil(t).month - 1;
        sum[m] += *v;
        count[m] += 1;
    }
    std::array<std::optional<double>, 12> out;
    for (int m = 0; m < 12; ++m) {
        if (count[m] > 0) out[m] = sum[m] / static_cast<double>(count[m]);
    }
    return out;
}

CovariateSourceSet::CovariateSourceSet(std::vector<CovariateGrid> grids) {
    for (auto& g : grids) add(std::move(g));
}

CovariateSourceSet CovariateSourceSet::from_dir(const std::string& dir) {
    return CovariateSourceSet(load_covariate_dir(dir));
}

void CovariateSourceSet::add(CovariateGrid grid) {
    grid.validate();
    if (feature_index(grid.name) < F_U100) {
        throw ValidationError("grid name '" + grid.name + "' is not a covariate feature");
    }
    if (by_name_.count(grid.name)) {
        throw ValidationError("duplicate covariate grid: " + grid.name);
    }
    by_name_[grid.name] = grids_.size();
    grids_.push_back(std::move(grid));
}

const CovariateGrid* CovariateSourceSet::find(const std::string& feature_name) const {
    const auto it = by_name_.find(feature_name);
    return it == by_name_.end() ? nullptr : &grids_[it->second];
}

bool CovariateSourceSet::complete() const { return missing_names().empty(); }

std::vector<std::string> CovariateSourceSet::missing_names() const {
    std::vector<std::string> missing;
    const auto& names = feature_names();
    for (int i = F_U100; i < kNumFeatures; ++i) {
        if (!by_name_.count(names[i])) missing.push_back(names[i]);
    }
    return missing;
}

void CovariateSourceSet::set_offset_override(const std::string& station_id, int offset_hours) {
    offset_overrides_[station_id] = offset_hours;
}

std::optional<int> CovariateSourceSet::offset_override(const std::string& station_id) const {
    const auto it = offset_overrides_.find(station_id);
    if (it == offset_overrides_.end()) return std::nullopt;
    return it->second;
}

FeatureVector assemble(double lat, double lon, UtcHour t, const CovariateSourceSet& sources,
                       std::optional<int> offset_override) {
    const int offset = offset_override ? *offset_override : utc_offset_from_longitude(lon);
    const TemporalFeatures tf = temporal_features(t, offset);

    FeatureVector out{};
    out[F_HOUR] = tf.hour;
    out[F_DAY_OF_WEEK] = tf.day_of_week;
    out[F_WEEK_NUMBER] = tf.week_number;
    out[F_MONTH] = tf.month;
    out[F_UTC_OFFSET] = tf.utc_offset;

    const auto& names = feature_names();
    for (int i = F_U100; i < kNumFeatures; ++i) {
        const CovariateGrid* g = sources.find(names[i]);
        if (!g) {
            throw ValidationError("assemble: no source for feature " + std::to_string(i) + " (" +
                                  names[i] + ")");
        }
        try {
            out[i] = interpolate_grid(*g, lat, lon, t);
        } catch (const ValidationError& e) {
            throw ValidationError("assemble: feature " + std::to_string(i) + " (" + names[i] +
                                  ") unresolvable: " + e.what());
        }
    }
    return out;
}

FrameAssembler::FrameAssembler(const CovariateSourceSet& sources, UtcHour t)
    : t_(t), base_(temporal_features(t, 0)) {
    const auto& names = feature_names();
    for (int i = F_U100; i < kNumFeatures; ++i) {
        const CovariateGrid* g = sources.find(names[i]);
        if (!g) continue;
        if (t < g->times.front()) continue;  // slice unavailable, leave missing
        views_[i] = slice_view(*g, t);
        have_[i] = true;
    }
}

bool FrameAssembler::try_assemble(double lat, double lon, int offset_hours,
                                  FeatureVector& out) const {
    out[F_HOUR] = base_.hour;
    out[F_DAY_OF_WEEK] = base_.day_of_week;
    out[F_WEEK_NUMBER] = base_.week_number;
    out[F_MONTH] = base_.month;
    out[F_UTC_OFFSET] = offset_hours;
    for (int i = F_U100; i < kNumFeatures; ++i) {
        if (!have_[i]) return false;
        if (!views_[i].interpolate(lat, lon, out[i])) return false;
    }
    return true;
}

void write_feature_matrix(const FeatureMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "station_id,network_id,country_code,continent,pollutant,timestamp_utc,target";
    for (const auto& name : feature_names()) out << ',' << name;
    out << "\n";
    for (const FeatureRow& r : m) {
        std::vector<std::string> fields = {r.station_id,
                                           r.network_id,
                                           r.country_code,
                                           to_string(r.continent),
                                           to_string(r.pollutant),
                                           format_rfc3339(r.timestamp),
                                           csv::format_double(r.target)};
        for (double v : r.features) fields.push_back(csv::format_double(v));
        out << csv::join_record(fields) << "\n";
    }
}

FeatureMatrix read_feature_matrix(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw ParseError(path + ": empty file");
    if (rows[0].size() != 7 + kNumFeatures) throw ParseError(path + ": unexpected header");
    FeatureMatrix m;
    m.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 7 + kNumFeatures) {
            throw ParseError(path + ":" + std::to_string(i + 1) + ": wrong field count");
        }
        FeatureRow row;
        row.station_id = r[0];
        row.network_id = r[1];
        row.country_code = r[2];
        row.continent = continent_from_string(r[3]);
        row.pollutant = pollutant_from_string(r[4]);
        row.timestamp = parse_rfc3339_hour(r[5]);
        row.target = csv::parse_double(r[6]);
        for (int f = 0; f < kNumFeatures; ++f) row.features[f] = csv::parse_double(r[7 + f]);
        m.push_back(std::move(row));
    }
    return m;
}

FeatureMatrix build_feature_matrix(const std::vector<MeasurementSeries>& series_set,
                                   const CovariateSourceSet& sources) {
    FeatureMatrix m;
    for (const MeasurementSeries& s : series_set) {
        const std::optional<int> override = sources.offset_override(s.station.station_id);
        for (const Sample& sample : s.samples) {
            FeatureRow row;
            row.station_id = s.station.station_id;
            row.network_id = s.station.network_id;
            row.country_code = s.station.country_code;
            row.continent = s.station.continent;
            row.pollutant = s.station.pollutant;
            row.timestamp = sample.t;
            row.target = sample.value;
            row.features = assemble(s.station.lat, s.station.lon, sample.t, sources, override);
            m.push_back(std::move(row));
        }
    }
    return m;
}

}  // namespace airq
