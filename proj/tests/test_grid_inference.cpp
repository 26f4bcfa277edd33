#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "airq/errors.hpp"
#include "airq/rng.hpp"
#include "airq/synthworld.hpp"
#include "airq/tile_infer.hpp"
#include "airq/tiles.hpp"

using namespace airq;

namespace {

GridSpec tiny_spec() {
    GridSpec s;
    s.lat0 = -60;
    s.lon0 = -150;
    s.dlat = 30;
    s.dlon = 60;
    s.nlat = 5;
    s.nlon = 6;
    return s;
}

// A small trained model over the 26 pipeline features.
gbdt::TreeEnsemble fixture_model(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> columns(kNumFeatures);
    std::vector<double> targets;
    for (int i = 0; i < 400; ++i) {
        for (int f = 0; f < kNumFeatures; ++f) {
            columns[static_cast<std::size_t>(f)].push_back(rng.uniform(0.0, 20.0));
        }
        targets.push_back(10.0 + 0.5 * columns[F_TEMP_2M].back() +
                          0.8 * columns[F_RS_NO2].back() + rng.normal(0.0, 0.5));
    }
    const auto data = gbdt::bin_features(columns, targets, gbdt::TransformKind::LogPlusEps, 63);
    gbdt::TrainParams p;
    p.num_leaves = 15;
    p.min_data_in_leaf = 10;
    p.max_trees = 30;
    gbdt::TreeEnsemble model = gbdt::train(p, data, data);
    model.pollutant = "NO2";
    return model;
}

}  // namespace

TEST_CASE("make_grid: corners, count, ordering") {
    const GridSpec spec = GridSpec::global_quarter_degree();
    CHECK(spec.cell_count() == 1036800);
    CHECK(spec.nlat * spec.nlon == 1036800);

    const auto cells = make_grid(tiny_spec());
    REQUIRE(cells.size() == 30);
    CHECK(cells.front().lat == -60);
    CHECK(cells.front().lon == -150);
    CHECK(cells.back().lat == 60);
    CHECK(cells.back().lon == 150);
    // Lat-major: longitude advances fastest.
    CHECK(cells[1].lat == -60);
    CHECK(cells[1].lon == -90);

    // Global corners per the default registration.
    const auto global = GridSpec::global_quarter_degree();
    CHECK(global.lat_at(0) == -89.875);
    CHECK(global.lon_at(0) == -179.875);
    CHECK(global.lat_at(global.nlat - 1) == 89.875);
    CHECK(global.lon_at(global.nlon - 1) == 179.875);
}

TEST_CASE("predict_tile: serial and multi-thread runs byte-identical") {
    const SynthWorld world = make_synth_world({.stations_per_country = 1, .days = 2});
    const CovariateSourceSet sources = synth_sources(world);
    const gbdt::TreeEnsemble model = fixture_model(3);
    const UtcHour t = world.series.front().samples.front().t;

    const GridSpec spec = tiny_spec();
    const PredictionTile serial = predict_tile(model, sources, t, spec, TileKind::Point, 1);
    const PredictionTile parallel = predict_tile(model, sources, t, spec, TileKind::Point, 8);
    CHECK(serial.values == parallel.values);

    namespace fs = std::filesystem;
    const auto p1 = (fs::temp_directory_path() / "tile_serial.aptile").string();
    const auto p2 = (fs::temp_directory_path() / "tile_parallel.aptile").string();
    write_tile(serial, p1);
    write_tile(parallel, p2);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
}

TEST_CASE("predict_tile: composition oracle against single predictions") {
    const SynthWorld world = make_synth_world({.stations_per_country = 1, .days = 2});
    const CovariateSourceSet sources = synth_sources(world);
    const gbdt::TreeEnsemble model = fixture_model(5);
    const UtcHour t = world.series.front().samples.front().t.plus_hours(7);

    const GridSpec spec = tiny_spec();
    const PredictionTile tile = predict_tile(model, sources, t, spec, TileKind::Point, 2);
    CHECK(tile.completeness() == 1.0);

    for (const GridCell& cell : make_grid(spec)) {
        const FeatureVector fv = assemble(cell.lat, cell.lon, t, sources);
        const double expected =
            model.predict(std::vector<double>(fv.begin(), fv.end()));
        CHECK(tile.at(cell.ilat, cell.ilon) == static_cast<float>(expected));
    }
}

TEST_CASE("predict_tile: constant world varies only with longitude-driven features") {
    // All covariates constant: cells sharing a longitude share hour/offset,
    // so values are equal down each column.
    std::vector<CovariateGrid> grids;
    const auto& names = feature_names();
    for (int i = F_U100; i < kNumFeatures; ++i) {
        CovariateGrid g;
        g.name = names[static_cast<std::size_t>(i)];
        g.lat0 = -90;
        g.lon0 = -180;
        g.dlat = 90;
        g.dlon = 90;
        g.nlat = 3;
        g.nlon = 5;
        g.times = {UtcHour{0}};
        g.values.assign(15, 7.0f);
        grids.push_back(std::move(g));
    }
    const CovariateSourceSet sources{std::move(grids)};
    const gbdt::TreeEnsemble model = fixture_model(9);
    const GridSpec spec = tiny_spec();
    const PredictionTile tile = predict_tile(model, sources, UtcHour{10}, spec, TileKind::Point, 1);
    for (int j = 0; j < spec.nlon; ++j) {
        for (int i = 1; i < spec.nlat; ++i) {
            CHECK(tile.at(i, j) == tile.at(0, j));
        }
    }
}

TEST_CASE("predict_tile: missing covariates produce sentinel cells and a ratio") {
    // Grids covering only the northern hemisphere leave southern cells missing.
    std::vector<CovariateGrid> grids;
    const auto& names = feature_names();
    for (int i = F_U100; i < kNumFeatures; ++i) {
        CovariateGrid g;
        g.name = names[static_cast<std::size_t>(i)];
        g.lat0 = 0;
        g.lon0 = -180;
        g.dlat = 45;
        g.dlon = 90;
        g.nlat = 3;
        g.nlon = 5;
        g.times = {UtcHour{0}};
        g.values.assign(15, 2.0f);
        grids.push_back(std::move(g));
    }
    const CovariateSourceSet sources{std::move(grids)};
    const gbdt::TreeEnsemble model = fixture_model(11);
    const GridSpec spec = tiny_spec();  // lats -60..60
    const PredictionTile tile = predict_tile(model, sources, UtcHour{3}, spec, TileKind::Point, 1);
    CHECK(tile.completeness() == doctest::Approx(3.0 / 5.0));  // lats 0, 30, 60 resolve
    for (int j = 0; j < spec.nlon; ++j) {
        CHECK(tile.at(0, j) == tile.missing);
        CHECK(tile.at(2, j) != tile.missing);
    }
}

TEST_CASE("tile file round trip and spec-hash guard") {
    const GridSpec spec = tiny_spec();
    PredictionTile tile;
    tile.pollutant = Pollutant::O3;
    tile.timestamp = UtcHour{123456};
    tile.kind = TileKind::Q95;
    tile.spec = spec;
    Rng rng(1);
    for (std::size_t c = 0; c < spec.cell_count(); ++c) {
        tile.values.push_back(static_cast<float>(rng.uniform(0.0, 100.0)));
    }
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "rt.aptile").string();
    write_tile(tile, path);
    const PredictionTile back = read_tile(path, spec);
    CHECK(back.values == tile.values);
    CHECK(back.pollutant == tile.pollutant);
    CHECK(back.timestamp == tile.timestamp);
    CHECK(back.kind == tile.kind);

    GridSpec other = spec;
    other.nlat += 1;
    CHECK_THROWS_AS(read_tile(path, other), ValidationError);

    // Truncated payload.
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto trunc_path = (fs::temp_directory_path() / "trunc.aptile").string();
    std::ofstream out(trunc_path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(read_tile(trunc_path, spec), ParseError);
}

TEST_CASE("model with wrong feature count is rejected") {
    const SynthWorld world = make_synth_world({.stations_per_country = 1, .days = 1});
    const CovariateSourceSet sources = synth_sources(world);
    gbdt::TreeEnsemble model = fixture_model(2);
    model.n_features = 5;
    CHECK_THROWS_AS(
        predict_tile(model, sources, UtcHour{0}, tiny_spec(), TileKind::Point, 1),
        ValidationError);
}
