#pragma once
#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "airq/covgrid.hpp"
#include "airq/station.hpp"
#include "airq/time.hpp"

namespace airq {

constexpr int kNumFeatures = 26;

// Canonical feature order. Indices 0-4 temporal, 5-15 meteorological,
// 16-19 remote sensing monthly averages, 20-25 emissions totals.
enum FeatureIndex : int {
    F_HOUR = 0,
    F_DAY_OF_WEEK = 1,
    F_WEEK_NUMBER = 2,
    F_MONTH = 3,
    F_UTC_OFFSET = 4,
    F_U100 = 5,
    F_V100 = 6,
    F_U10 = 7,
    F_V10 = 8,
    F_DEWPOINT_2M = 9,
    F_TEMP_2M = 10,
    F_BOUNDARY_LAYER_HEIGHT = 11,
    F_DOWNWARD_UV = 12,
    F_WIND_GUST_10M = 13,
    F_SURFACE_PRESSURE = 14,
    F_TOTAL_COLUMN_RAIN_WATER = 15,
    F_RS_NO2 = 16,
    F_RS_O3 = 17,
    F_RS_SO2 = 18,
    F_RS_AAI = 19,
    F_EM_CO = 20,
    F_EM_NOX = 21,
    F_EM_NMVOC = 22,
    F_EM_OTHER_VOC = 23,
    F_EM_SO2 = 24,
    F_EM_BIOGENIC_CO = 25,
};

using FeatureVector = std::array<double, kNumFeatures>;

const std::array<std::string, kNumFeatures>& feature_names();
int feature_index(const std::string& name);  // -1 if unknown

struct TemporalFeatures {
    int hour = 0;         // [0, 23]
    int day_of_week = 0;  // [0, 6], Monday = 0
    int week_number = 1;  // ISO-8601, [1, 53]
    int month = 1;        // [1, 12]
    int utc_offset = 0;   // passed through
};

// Computed from the UTC instant itself; the offset rides along as its own
// feature rather than shifting the clock.
TemporalFeatures temporal_features(UtcHour t, int offset_hours);

// round(lon / 15) half away from zero, clamped to [-12, 14].
// Throws ValidationError for lon outside [-180, 180).
int utc_offset_from_longitude(double lon);

// Mean of the non-missing values per calendar month (1..12); a month with no
// observations stays unset.
std::array<std::optional<double>, 12> monthly_average(
    const std::vector<std::pair<UtcHour, std::optional<double>>>& series);

// The 21 non-temporal covariate grids plus optional per-station UTC-offset
// overrides, keyed by canonical feature name.
class CovariateSourceSet {
public:
    CovariateSourceSet() = default;
    explicit CovariateSourceSet(std::vector<CovariateGrid> grids);

    static CovariateSourceSet from_dir(const std::string& dir);

    void add(CovariateGrid grid);
    const CovariateGrid* find(const std::string& feature_name) const;
    bool complete() const;  // all 21 covariate grids present
    std::vector<std::string> missing_names() const;

    void set_offset_override(const std::string& station_id, int offset_hours);
    std::optional<int> offset_override(const std::string& station_id) const;

    const std::vector<CovariateGrid>& grids() const { return grids_; }

private:
    std::vector<CovariateGrid> grids_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::unordered_map<std::string, int> offset_overrides_;
};

// Assembles the canonical 26-element vector. Throws ValidationError naming
// the feature index for any unresolvable covariate.
FeatureVector assemble(double lat, double lon, UtcHour t, const CovariateSourceSet& sources,
                       std::optional<int> offset_override = std::nullopt);

// Pre-resolved time slices for one instant; the tile hot path uses this to
// avoid per-cell slice lookups. Missing covariates yield false, not a throw.
class FrameAssembler {
public:
    FrameAssembler(const CovariateSourceSet& sources, UtcHour t);
    bool try_assemble(double lat, double lon, int offset_hours, FeatureVector& out) const;
    UtcHour time() const { return t_; }

private:
    UtcHour t_;
    TemporalFeatures base_;
    std::array<GridSliceView, kNumFeatures> views_{};  // slots 5..25 populated
    std::array<bool, kNumFeatures> have_{};
};

struct FeatureRow {
    std::string station_id;
    std::string network_id;
    std::string country_code;
    Continent continent = Continent::Europe;
    Pollutant pollutant = Pollutant::NO2;
    UtcHour timestamp;
    double target = 0.0;  // ug/m3
    FeatureVector features{};
};

using FeatureMatrix = std::vector<FeatureRow>;

// features.csv: grouping keys, target, then the 26 canonical feature columns.
// Doubles are written with round-trip precision, so write/read is bit-exact.
void write_feature_matrix(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_feature_matrix(const std::string& path);

// Builds one row per sample of each series. A sample whose covariates cannot
// be resolved is an error (assembly failures name the feature index).
FeatureMatrix build_feature_matrix(const std::vector<MeasurementSeries>& series_set,
                                   const CovariateSourceSet& sources);

}  // namespace airq
