#include "airq/intervals.hpp"

#include <algorithm>
#include <fstream>

#include "airq/csv.hpp"
#include "airq/errors.hpp"

namespace airq {

QuantileTriplet train_triplet(const gbdt::TrainParams& params,
                              const gbdt::BinnedDataset& train_set,
                              const gbdt::BinnedDataset& valid_set) {
    QuantileTriplet t;
    gbdt::TrainParams p = params;
    p.loss = gbdt::LossKind::Pinball;
    p.quantile = 0.05;
    t.q05 = gbdt::train(p, train_set, valid_set);
    p.quantile = 0.5;
    t.q50 = gbdt::train(p, train_set, valid_set);
    p.quantile = 0.95;
    t.q95 = gbdt::train(p, train_set, valid_set);
    return t;
}

IntervalPrediction predict_interval(const QuantileTriplet& triplet,
                                    const std::vector<double>& features) {
    double v[3] = {triplet.q05.predict(features), triplet.q50.predict(features),
                   triplet.q95.predict(features)};
    std::sort(v, v + 3);
    return IntervalPrediction{v[0], v[1], v[2]};
}

std::vector<CellRank> interval_size_sum(
    const std::vector<std::pair<PredictionTile, PredictionTile>>& lo_hi_tiles,
    std::size_t top_k) {
    if (lo_hi_tiles.empty()) throw ValidationError("interval_size_sum: no tiles");
    const GridSpec& spec = lo_hi_tiles.front().first.spec;
    for (const auto& [lo, hi] : lo_hi_tiles) {
        if (!(lo.spec == spec) || !(hi.spec == spec)) {
            throw ValidationError("interval_size_sum: tile geometry mismatch");
        }
        if (lo.timestamp != hi.timestamp) {
            throw ValidationError("interval_size_sum: lo/hi tiles not paired by timestamp");
        }
    }

    const std::size_t cells = spec.cell_count();
    std::vector<double> sums(cells, 0.0);
    std::vector<bool> valid(cells, true);
    for (const auto& [lo, hi] : lo_hi_tiles) {
        for (std::size_t c = 0; c < cells; ++c) {
            if (lo.values[c] == lo.missing || hi.values[c] == hi.missing) {
                valid[c] = false;
            } else {
                sums[c] += static_cast<double>(hi.values[c]) - static_cast<double>(lo.values[c]);
            }
        }
    }

    std::vector<CellRank> out;
    out.reserve(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        if (!valid[c]) continue;
        const int i = static_cast<int>(c) / spec.nlon;
        const int j = static_cast<int>(c) % spec.nlon;
        out.push_back(CellRank{0, spec.lat_at(i), spec.lon_at(j), sums[c]});
    }
    std::sort(out.begin(), out.end(), [](const CellRank& a, const CellRank& b) {
        if (a.interval_size_sum != b.interval_size_sum) {
            return a.interval_size_sum > b.interval_size_sum;
        }
        if (a.lat != b.lat) return a.lat < b.lat;
        return a.lon < b.lon;
    });
    if (top_k > 0 && out.size() > top_k) out.resize(top_k);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
    return out;
}

void write_ranking_csv(const std::vector<CellRank>& ranking, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "rank,lat,lon,interval_size_sum\n";
    for (const CellRank& r : ranking) {
        out << r.rank << ',' << csv::format_double(r.lat) << ',' << csv::format_double(r.lon)
            << ',' << csv::format_double(r.interval_size_sum) << "\n";
    }
}

}  // namespace airq
