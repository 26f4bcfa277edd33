#include "airq/tile_infer.hpp"

#include <atomic>
#include <thread>
#include <vector>

#include "airq/errors.hpp"

namespace airq {

PredictionTile predict_tile(const gbdt::TreeEnsemble& model, const CovariateSourceSet& sources,
                            UtcHour t, const GridSpec& spec, TileKind kind, int threads) {
    if (model.n_features != kNumFeatures) {
        throw ValidationError("predict_tile: model expects " + std::to_string(model.n_features) +
                              " features, grid assembly provides " +
                              std::to_string(kNumFeatures));
    }
    PredictionTile tile;
    tile.pollutant =
        model.pollutant.empty() ? Pollutant::NO2 : pollutant_from_string(model.pollutant);
    tile.timestamp = t;
    tile.kind = kind;
    tile.spec = spec;
    tile.values.assign(spec.cell_count(), tile.missing);

    const FrameAssembler frame(sources, t);

    // Per-column UTC offsets; constant down a column of constant longitude.
    std::vector<int> offsets(static_cast<std::size_t>(spec.nlon));
    for (int j = 0; j < spec.nlon; ++j) {
        offsets[static_cast<std::size_t>(j)] = utc_offset_from_longitude(spec.lon_at(j));
    }

    auto run_rows = [&](int row_begin, int row_end) {
        FeatureVector fv;
        for (int i = row_begin; i < row_end; ++i) {
            const double lat = spec.lat_at(i);
            float* out_row = tile.values.data() + static_cast<std::size_t>(i) * spec.nlon;
            for (int j = 0; j < spec.nlon; ++j) {
                if (!frame.try_assemble(lat, spec.lon_at(j), offsets[static_cast<std::size_t>(j)],
                                        fv)) {
                    continue;
                }
                out_row[j] = static_cast<float>(model.predict_unchecked(fv.data()));
            }
        }
    };

    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min(n_threads, spec.nlat);

    if (n_threads == 1) {
        run_rows(0, spec.nlat);
    } else {
        // Static row-block partition: cell ownership is disjoint, so the
        // result does not depend on scheduling.
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(n_threads));
        const int rows_per = (spec.nlat + n_threads - 1) / n_threads;
        for (int w = 0; w < n_threads; ++w) {
            const int begin = w * rows_per;
            const int end = std::min(spec.nlat, begin + rows_per);
            if (begin >= end) break;
            workers.emplace_back(run_rows, begin, end);
        }
        for (auto& th : workers) th.join();
    }
    return tile;
}

}  // namespace airq
