#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airq/covgrid.hpp"
#include "airq/daqi.hpp"
#include "airq/features.hpp"
#include "airq/station.hpp"

namespace airq {

// Deterministic synthetic world for tests, demos, and the bundled fixtures:
// four countries on two continents, five networks, smooth global covariate
// fields, and targets generated as a known function of the assembled features
// plus a country-level additive offset and Gaussian noise.
struct SynthWorldOptions {
    int stations_per_country = 5;  // 4 countries -> 20 stations
    int days = 30;
    std::uint64_t seed = 7;
    Pollutant pollutant = Pollutant::NO2;
    double noise_sigma = 1.0;
    bool include_adversarial = false;  // add the 12-station QC rule fixture
    UtcHour start = UtcHour{days_from_civil(2022, 1, 1) * 24};
    double met_dlat = 12.0;  // spatial resolution of the hourly grids
    double met_dlon = 12.0;
};

struct SynthWorld {
    std::vector<StationMeta> stations;
    std::vector<MeasurementSeries> series;
    std::vector<CovariateGrid> grids;  // all 21 covariates, global coverage
    DaqiTable daqi;
    // Intended QC outcome per adversarial station (nullopt = should be kept),
    // recorded at construction time, independent of apply_qc.
    std::map<std::string, std::optional<QcRule>> qc_labels;
    std::map<std::string, double> country_offsets;
};

SynthWorld make_synth_world(const SynthWorldOptions& opt);

// The noise-free target for a feature vector plus country offset; the
// generator adds N(0, sigma) on top of this.
double synth_target_mean(const FeatureVector& f, double country_offset);

CovariateSourceSet synth_sources(const SynthWorld& world);

// Writes stations.csv, measurements.csv, covariates/, daqi.csv, and a
// run.toml wired to those paths. csv_grids selects the text grid format
// (larger but human-readable) over binary covgrid files.
void write_synth_world(const SynthWorld& world, const std::string& dir, bool csv_grids = false);

}  // namespace airq
