#pragma once
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airq/gbdt.hpp"
#include "airq/station.hpp"
#include "airq/tuner.hpp"

namespace airq {

// Declarative run configuration. File format: flat typed key = value lines
// under [section] headers, '#' comments, strings quoted. Unknown or duplicate
// keys are itemized errors.
struct RunConfig {
    // [paths]
    std::string stations;
    std::string measurements;
    std::string covariates;  // directory
    std::string daqi;
    std::string offsets;  // optional station_id,utc_offset_hours overrides
    std::string out = "out";

    // [run]
    Pollutant pollutant = Pollutant::NO2;
    std::uint64_t seed = 42;
    int threads = 0;  // 0 = hardware concurrency

    // [train]
    gbdt::TrainParams train;

    // [tune]
    SearchSpace search;
    int tune_candidates = 5;

    // [experiment]
    int kfold_k = 10;

    // [grid]
    std::vector<UtcHour> grid_times;
    std::string grid_kinds = "point";  // "point" or "intervals"
};

// Parses, validates, and fills defaults. Throws ConfigError with one line per
// problem (unknown key, duplicate key, type mismatch, missing file, max_bin
// != 63, ...).
RunConfig validate_config(const std::string& path);

// Documented defaults for --help.
std::string config_reference();

}  // namespace airq
