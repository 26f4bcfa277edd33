#pragma once
#include "airq/features.hpp"
#include "airq/gbdt.hpp"
#include "airq/tiles.hpp"

namespace airq {

// Runs the model at every cell center of the grid for one hour, each cell an
// independent synthetic monitoring station. Cells whose covariates cannot be
// resolved carry the missing sentinel. Workers cover disjoint row blocks and
// write disjoint cells, so output is bit-identical for any thread count.
// threads = 0 uses the hardware concurrency.
PredictionTile predict_tile(const gbdt::TreeEnsemble& model, const CovariateSourceSet& sources,
                            UtcHour t, const GridSpec& spec = GridSpec::global_quarter_degree(),
                            TileKind kind = TileKind::Point, int threads = 0);

}  // namespace airq
