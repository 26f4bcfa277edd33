#pragma once
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airq/station.hpp"
#include "airq/tiles.hpp"

namespace airq {

// UK DAQI banding: ten bands per pollutant with inclusive upper edges, band
// 10 unbounded. Band groups: Low 1-3, Moderate 4-6, High 7-9, Very High 10.
class DaqiTable {
public:
    // `bounds` are the upper edges of bands 1..10 in ug/m3, strictly
    // increasing; the tenth must be +infinity.
    void set_bands(Pollutant p, const std::array<double, 10>& bounds);
    bool has(Pollutant p) const;

    // Smallest band whose upper bound >= c (inclusive edges). Throws
    // ConfigError for a pollutant with no configured bands, ValidationError
    // for negative concentrations.
    int subindex(Pollutant p, double concentration) const;

    const std::array<double, 10>& bands(Pollutant p) const;

    // CSV schema: pollutant,band,upper_bound with `inf` permitted for band 10.
    static DaqiTable from_csv(const std::string& path);
    void write_csv(const std::string& path) const;

    // The public UK DEFRA DAQI breakpoints, the default configuration.
    static DaqiTable uk_default();

private:
    std::map<Pollutant, std::array<double, 10>> bands_;
};

// Maximum of the available subindices. Throws ValidationError on empty input.
int overall_index(const std::vector<int>& subindices);

std::string band_group(int index);  // "Low", "Moderate", "High", "Very High"

// Per-cell concentration -> subindex tile. Missing cells stay missing.
PredictionTile subindex_tile(const PredictionTile& concentration, const DaqiTable& table);

// Per-cell maximum across per-pollutant subindex tiles (shared geometry).
PredictionTile overall_index_tile(const std::vector<PredictionTile>& subindex_tiles);

// Per-cell sum of the supplied hourly index tiles. Cells missing in any input
// tile are missing in the output.
PredictionTile annual_summation(const std::vector<PredictionTile>& index_tiles);

// Per-cell argmax pollutant over the per-pollutant summation tiles; ties go
// to the earlier pollutant in the fixed order NO2 < O3 < PM10 < PM2_5 < SO2.
// Cell values hold the pollutant's index in all_pollutants().
PredictionTile driving_subindex(const std::vector<PredictionTile>& summations_per_pollutant);

}  // namespace airq
