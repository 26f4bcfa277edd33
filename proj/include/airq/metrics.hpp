#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airq/station.hpp"

namespace airq {

struct StationScore {
    std::string station_id;
    Pollutant pollutant = Pollutant::NO2;
    Continent continent = Continent::Europe;
    std::string experiment;
    std::size_t n = 0;
    double r2 = 0.0;
    double bias = 0.0;
    std::optional<double> pearson;  // unset when either series is constant
};

// 1 - SS_res/SS_tot about the observation mean; arbitrarily negative.
// Throws ValidationError for length < 2 or constant observations.
double r2_score(const std::vector<double>& obs, const std::vector<double>& pred);

// mean(pred - obs); positive means the model overestimates.
double bias(const std::vector<double>& obs, const std::vector<double>& pred);

// Product-moment correlation; nullopt when either series is constant.
std::optional<double> pearson(const std::vector<double>& obs, const std::vector<double>& pred);

// (p05, p95, width) via linear interpolation between order statistics.
struct Iqr90 {
    double p05 = 0.0;
    double p95 = 0.0;
    double width = 0.0;
};
Iqr90 iqr90(const std::vector<double>& values);

// One row of the per-continent positive-R2 table for one pollutant.
struct ContinentTableRow {
    Pollutant pollutant = Pollutant::NO2;
    std::size_t total_stations = 0;
    std::map<Continent, std::size_t> positive_r2;  // every continent present
};

ContinentTableRow positive_r2_table(Pollutant pollutant,
                                    const std::vector<StationScore>& scores);

void write_scores_csv(const std::vector<StationScore>& scores, const std::string& path);
std::vector<StationScore> read_scores_csv(const std::string& path);
void write_continent_table(const std::vector<ContinentTableRow>& rows, const std::string& path);

}  // namespace airq
