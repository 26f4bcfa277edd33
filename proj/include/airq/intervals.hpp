#pragma once
#include <string>
#include <vector>

#include "airq/gbdt.hpp"
#include "airq/tiles.hpp"

namespace airq {

// Independent pinball-loss ensembles for the 0.05/0.5/0.95 quantiles, sharing
// bin boundaries and the target transform.
struct QuantileTriplet {
    gbdt::TreeEnsemble q05;
    gbdt::TreeEnsemble q50;
    gbdt::TreeEnsemble q95;
};

struct IntervalPrediction {
    double lo = 0.0;
    double mid = 0.0;
    double hi = 0.0;
};

// Three trainings that differ only in the pinball quantile.
QuantileTriplet train_triplet(const gbdt::TrainParams& params,
                              const gbdt::BinnedDataset& train_set,
                              const gbdt::BinnedDataset& valid_set);

// Raw triplet predictions sorted ascending (independent models may cross),
// then assigned (lo, mid, hi). All values >= 0.
IntervalPrediction predict_interval(const QuantileTriplet& triplet,
                                    const std::vector<double>& features);

struct CellRank {
    std::size_t rank = 0;  // 1-based
    double lat = 0.0;
    double lon = 0.0;
    double interval_size_sum = 0.0;
};

// Per cell, sum of (hi - lo) across the supplied hours, sorted descending;
// ties resolve by (lat, lon) ascending. Cells missing in any pair are
// skipped. top_k = 0 keeps every cell.
std::vector<CellRank> interval_size_sum(
    const std::vector<std::pair<PredictionTile, PredictionTile>>& lo_hi_tiles,
    std::size_t top_k = 100);

// rank,lat,lon,interval_size_sum
void write_ranking_csv(const std::vector<CellRank>& ranking, const std::string& path);

}  // namespace airq
