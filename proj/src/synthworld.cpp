#include "airq/synthworld.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "airq/csv.hpp"
#include "airq/errors.hpp"
#include "airq/rng.hpp"

namespace airq {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CountryDef {
    const char* code;
    Continent continent;
    double lat_min, lat_max;
    double lon_min, lon_max;
    double offset;  // additive country-level target offset (the bias source)
};

// Disjoint latitude bands per country so the spatially varying covariates can
// localize a station in the baseline experiment.
const CountryDef kCountries[4] = {
    {"ES", Continent::Europe, 36.0, 42.0, -8.0, 2.0, 0.0},
    {"FR", Continent::Europe, 44.0, 50.0, 0.0, 8.0, 6.0},
    {"US", Continent::NorthAmerica, 32.0, 40.0, -115.0, -85.0, -6.0},
    {"CA", Continent::NorthAmerica, 46.0, 54.0, -115.0, -85.0, 12.0},
};

struct FieldDef {
    double base;
    double diurnal_amp;  // sin over hour of day
    double lat_slope;    // linear in lat/90
    double lon_amp;      // sin over longitude
    double phase;
};

// One smooth analytic field per covariate feature (indices 5..25).
FieldDef field_def(int feature) {
    switch (feature) {
        case F_U100: return {2.0, 3.0, 1.0, 2.0, 0.3};
        case F_V100: return {-1.0, 2.0, -2.0, 1.5, 1.1};
        case F_U10: return {1.0, 2.0, 0.5, 1.0, 0.7};
        case F_V10: return {-0.5, 1.5, -1.0, 1.0, 1.9};
        case F_DEWPOINT_2M: return {8.0, 4.0, -12.0, 2.0, 0.2};
        case F_TEMP_2M: return {15.0, 10.0, -18.0, 3.0, 0.0};
        case F_BOUNDARY_LAYER_HEIGHT: return {600.0, 300.0, -150.0, 80.0, 0.5};
        case F_DOWNWARD_UV: return {120.0, 100.0, -60.0, 20.0, 0.0};
        case F_WIND_GUST_10M: return {6.0, 3.0, 2.0, 2.0, 2.3};
        case F_SURFACE_PRESSURE: return {1013.0, 4.0, -10.0, 5.0, 1.3};
        case F_TOTAL_COLUMN_RAIN_WATER: return {0.8, 0.5, -0.4, 0.3, 0.9};
        case F_RS_NO2: return {3.0, 0.0, 1.6, 1.2, 0.4};
        case F_RS_O3: return {120.0, 0.0, 30.0, 15.0, 1.2};
        case F_RS_SO2: return {0.6, 0.0, 0.3, 0.2, 2.1};
        case F_RS_AAI: return {0.5, 0.0, 0.8, 0.5, 0.8};
        case F_EM_CO: return {5.0, 0.0, 2.5, 1.5, 0.1};
        case F_EM_NOX: return {4.0, 0.0, 3.0, 1.0, 1.7};
        case F_EM_NMVOC: return {2.0, 0.0, 1.0, 0.8, 0.6};
        case F_EM_OTHER_VOC: return {1.0, 0.0, 0.5, 0.4, 2.8};
        case F_EM_SO2: return {1.5, 0.0, 1.2, 0.6, 1.5};
        case F_EM_BIOGENIC_CO: return {2.5, 0.0, -1.5, 1.0, 0.3};
        default: return {0.0, 0.0, 0.0, 0.0, 0.0};
    }
}

double field_value(int feature, int hour_of_day, double lat, double lon) {
    const FieldDef d = field_def(feature);
    return d.base + d.diurnal_amp * std::sin(2.0 * kPi * hour_of_day / 24.0 + d.phase) +
           d.lat_slope * (lat / 90.0) + d.lon_amp * std::sin(kPi * lon / 180.0 + d.phase);
}

CovariateGrid make_field_grid(int feature, const SynthWorldOptions& opt, bool hourly) {
    CovariateGrid g;
    g.name = feature_names()[static_cast<std::size_t>(feature)];
    g.dlat = opt.met_dlat;
    g.dlon = opt.met_dlon;
    g.lat0 = -90.0;
    g.lon0 = -180.0;
    g.nlat = static_cast<int>(std::floor(180.0 / g.dlat)) + 1;
    g.nlon = static_cast<int>(std::floor(360.0 / g.dlon)) + 1;
    if (hourly) {
        const int n = opt.days * 24;
        g.times.reserve(static_cast<std::size_t>(n));
        for (int h = 0; h < n; ++h) g.times.push_back(opt.start.plus_hours(h));
    } else {
        // Monthly slices covering the run (remote sensing / emissions).
        UtcHour t = opt.start;
        const UtcHour end = opt.start.plus_hours(static_cast<std::int64_t>(opt.days) * 24);
        while (t < end) {
            const CivilDateTime c = to_civil(t);
            g.times.push_back(from_civil(CivilDateTime{c.year, c.month, 1, 0}));
            const int ny = c.month == 12 ? c.year + 1 : c.year;
            const int nm = c.month == 12 ? 1 : c.month + 1;
            t = from_civil(CivilDateTime{ny, nm, 1, 0});
        }
    }
    g.values.resize(g.times.size() * static_cast<std::size_t>(g.nlat) * g.nlon);
    for (std::size_t ti = 0; ti < g.times.size(); ++ti) {
        const int hod = to_civil(g.times[ti]).hour;
        for (int i = 0; i < g.nlat; ++i) {
            for (int j = 0; j < g.nlon; ++j) {
                g.at(ti, i, j) = static_cast<float>(
                    field_value(feature, hod, g.lat0 + i * g.dlat, g.lon0 + j * g.dlon));
            }
        }
    }
    return g;
}

std::string station_name(const std::string& country, int k) {
    return "SYN_" + country + "_" + std::to_string(k);
}

}  // namespace

double synth_target_mean(const FeatureVector& f, double country_offset) {
    const double weekday = f[F_DAY_OF_WEEK] <= 4.0 ? 2.0 : -2.0;
    return 25.0 + 8.0 * std::sin(2.0 * kPi * f[F_HOUR] / 24.0) + weekday +
           0.45 * (f[F_TEMP_2M] - 15.0) + 0.02 * (f[F_BOUNDARY_LAYER_HEIGHT] - 600.0) +
           1.2 * f[F_RS_NO2] + 0.8 * f[F_EM_NOX] + country_offset;
}

CovariateSourceSet synth_sources(const SynthWorld& world) {
    return CovariateSourceSet(world.grids);
}

SynthWorld make_synth_world(const SynthWorldOptions& opt) {
    if (opt.stations_per_country < 1 || opt.days < 1) {
        throw ValidationError("synth world needs at least one station per country and one day");
    }
    SynthWorld world;
    world.daqi = DaqiTable::uk_default();

    for (int f = F_U100; f < kNumFeatures; ++f) {
        world.grids.push_back(make_field_grid(f, opt, f <= F_TOTAL_COLUMN_RAIN_WATER));
    }
    const CovariateSourceSet sources(world.grids);

    const int hours = opt.days * 24;
    for (const CountryDef& country : kCountries) {
        world.country_offsets[country.code] = country.offset;
        for (int k = 0; k < opt.stations_per_country; ++k) {
            StationMeta meta;
            meta.station_id = station_name(country.code, k);
            // ES hosts two networks so one country exercises the
            // within-network split; the rest have one network each.
            meta.network_id = std::string("net_") + country.code +
                              (std::string(country.code) == "ES" && k % 2 == 1 ? "_b" : "");
            meta.country_code = country.code;
            meta.continent = country.continent;
            meta.pollutant = opt.pollutant;
            meta.unit = Unit::ug_m3;

            Rng pos_rng(derive_seed(opt.seed, "station_pos:" + meta.station_id));
            meta.lat = pos_rng.uniform(country.lat_min, country.lat_max);
            meta.lon = pos_rng.uniform(country.lon_min, country.lon_max);

            MeasurementSeries series;
            series.station = meta;
            Rng noise_rng(derive_seed(opt.seed, "noise:" + meta.station_id));
            for (int h = 0; h < hours; ++h) {
                const UtcHour t = opt.start.plus_hours(h);
                const FeatureVector f = assemble(meta.lat, meta.lon, t, sources);
                const double mean = synth_target_mean(f, country.offset);
                const double y = std::max(0.05, mean + noise_rng.normal(0.0, opt.noise_sigma));
                series.samples.push_back(Sample{t, y});
            }
            world.stations.push_back(meta);
            world.series.push_back(std::move(series));
        }
    }

    if (opt.include_adversarial) {
        const CountryDef& es = kCountries[0];
        auto add_station = [&](const std::string& id, Unit unit,
                               std::optional<QcRule> expected) -> MeasurementSeries& {
            StationMeta meta;
            meta.station_id = id;
            meta.network_id = "net_qc";
            meta.country_code = es.code;
            meta.continent = es.continent;
            meta.pollutant = opt.pollutant;
            meta.unit = unit;
            Rng pos_rng(derive_seed(opt.seed, "station_pos:" + id));
            meta.lat = pos_rng.uniform(es.lat_min, es.lat_max);
            meta.lon = pos_rng.uniform(es.lon_min, es.lon_max);
            world.stations.push_back(meta);
            world.qc_labels[id] = expected;
            world.series.push_back(MeasurementSeries{meta, {}});
            return world.series.back();
        };
        // A week of complete hourly data with varying values passes all rules.
        auto fill_clean = [&](MeasurementSeries& s, std::uint64_t salt) {
            Rng rng(derive_seed(opt.seed, "qc_clean:" + std::to_string(salt)));
            for (int h = 0; h < 7 * 24; ++h) {
                const double v =
                    20.0 + 6.0 * std::sin(2.0 * kPi * h / 24.0) + rng.uniform(0.0, 2.0);
                s.samples.push_back(Sample{opt.start.plus_hours(h), v});
            }
        };

        for (int i = 0; i < 6; ++i) {
            fill_clean(add_station("QC_CLEAN_" + std::to_string(i), Unit::ug_m3, std::nullopt),
                       static_cast<std::uint64_t>(i));
        }
        fill_clean(add_station("QC_R1_PPB", Unit::ppb, QcRule::R1_PpbUnit), 100);
        {
            auto& s = add_station("QC_R2_SPARSE", Unit::ug_m3, QcRule::R2_TooFewPoints);
            s.samples.push_back(Sample{opt.start, 10.0});
            s.samples.push_back(Sample{opt.start.plus_hours(1), 11.0});
        }
        {
            auto& s = add_station("QC_R3_DUP", Unit::ug_m3, QcRule::R3_DuplicateTimestampDiffers);
            fill_clean(s, 101);
            s.samples.push_back(Sample{opt.start.plus_hours(5), 99.0});  // conflicting duplicate
        }
        {
            auto& s = add_station("QC_R4_CONST", Unit::ug_m3, QcRule::R4_ConstantValue);
            for (int h = 0; h < 7 * 24; ++h) {
                s.samples.push_back(Sample{opt.start.plus_hours(h), 7.0});
            }
        }
        {
            auto& s = add_station("QC_R5_HOUR_GAP", Unit::ug_m3, QcRule::R5_MissingHourOfDay);
            Rng rng(derive_seed(opt.seed, "qc_r5"));
            for (int h = 0; h < 7 * 24; ++h) {
                if (h % 24 == 13) continue;  // hour 13 never reported
                s.samples.push_back(
                    Sample{opt.start.plus_hours(h), 15.0 + rng.uniform(0.0, 5.0)});
            }
        }
        {
            auto& s = add_station("QC_R6_DAY_GAP", Unit::ug_m3, QcRule::R6_MissingDayOfWeek);
            Rng rng(derive_seed(opt.seed, "qc_r6"));
            for (int h = 0; h < 7 * 24; ++h) {
                const UtcHour t = opt.start.plus_hours(h);
                if (weekday_from_days(t.hours / 24) == 6) continue;  // Sundays never reported
                s.samples.push_back(Sample{t, 15.0 + rng.uniform(0.0, 5.0)});
            }
        }
    }
    return world;
}

void write_synth_world(const SynthWorld& world, const std::string& dir, bool csv_grids) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    fs::create_directories(dir + "/covariates");

    {
        std::ofstream out(dir + "/stations.csv");
        if (!out) throw IoError("cannot write stations.csv in " + dir);
        out << "station_id,network_id,country_code,continent,lat,lon,pollutant,unit\n";
        for (const StationMeta& s : world.stations) {
            out << csv::join_record({s.station_id, s.network_id, s.country_code,
                                     to_string(s.continent), csv::format_double(s.lat),
                                     csv::format_double(s.lon), to_string(s.pollutant),
                                     to_string(s.unit)})
                << "\n";
        }
    }
    {
        std::ofstream out(dir + "/measurements.csv");
        if (!out) throw IoError("cannot write measurements.csv in " + dir);
        out << "station_id,pollutant,timestamp_utc,value,unit\n";
        for (const MeasurementSeries& series : world.series) {
            for (const Sample& s : series.samples) {
                out << csv::join_record({series.station.station_id,
                                         to_string(series.station.pollutant),
                                         format_rfc3339(s.t), csv::format_double(s.value),
                                         to_string(series.station.unit)})
                    << "\n";
            }
        }
    }
    for (const CovariateGrid& g : world.grids) {
        if (csv_grids) {
            std::ofstream out(dir + "/covariates/" + g.name + ".csv");
            if (!out) throw IoError("cannot write grid csv in " + dir);
            out << "time,lat,lon,value\n";
            for (std::size_t ti = 0; ti < g.times.size(); ++ti) {
                for (int i = 0; i < g.nlat; ++i) {
                    for (int j = 0; j < g.nlon; ++j) {
                        out << format_rfc3339(g.times[ti]) << ','
                            << csv::format_double(g.lat0 + i * g.dlat) << ','
                            << csv::format_double(g.lon0 + j * g.dlon) << ','
                            << csv::format_double(g.at(ti, i, j)) << "\n";
                    }
                }
            }
        } else {
            write_covgrid(g, dir + "/covariates/" + g.name + ".covgrid");
        }
    }
    world.daqi.write_csv(dir + "/daqi.csv");

    {
        std::ofstream out(dir + "/run.toml");
        if (!out) throw IoError("cannot write run.toml in " + dir);
        out << "[paths]\n"
            << "stations = \"" << dir << "/stations.csv\"\n"
            << "measurements = \"" << dir << "/measurements.csv\"\n"
            << "covariates = \"" << dir << "/covariates\"\n"
            << "daqi = \"" << dir << "/daqi.csv\"\n"
            << "out = \"" << dir << "/out\"\n\n"
            << "[run]\n"
            << "pollutant = \"" << to_string(world.series.front().station.pollutant) << "\"\n"
            << "seed = 42\n\n"
            << "[train]\n"
            << "num_leaves = 63\n"
            << "min_data_in_leaf = 20\n"
            << "learning_rate = 0.1\n"
            << "max_trees = 300\n";
    }
}

}  // namespace airq
