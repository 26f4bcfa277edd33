#pragma once
#include <string>
#include <vector>

#include "airq/config.hpp"
#include "airq/daqi.hpp"
#include "airq/features.hpp"
#include "airq/gbdt.hpp"
#include "airq/metrics.hpp"
#include "airq/splitter.hpp"
#include "airq/station.hpp"

namespace airq {

enum class ExperimentKind { Baseline, WithinNetwork, BetweenCountry, BetweenContinent };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

// Everything the modeling stages consume, produced by QC + assembly.
struct PipelineData {
    std::vector<StationMeta> stations;  // kept, matching the configured pollutant
    std::vector<MeasurementSeries> series;
    QcReport qc_report;
    FeatureMatrix matrix;
    DaqiTable daqi;
    CovariateSourceSet sources;
};

// stations -> measurements -> QC -> feature assembly, filtered to the
// configured pollutant. with_features = false stops after QC.
PipelineData load_pipeline_data(const RunConfig& config, bool with_features = true);

// Binned view of selected matrix rows; validation/test sets reuse the train
// edges to honor the shared-boundary precondition.
gbdt::BinnedDataset bin_rows(const FeatureMatrix& matrix, const std::vector<std::size_t>& rows,
                             int max_bins);
gbdt::BinnedDataset bin_rows_with_edges(const FeatureMatrix& matrix,
                                        const std::vector<std::size_t>& rows,
                                        const std::vector<std::vector<double>>& edges);

// Predictions in original units for the given rows.
std::vector<double> predict_rows(const gbdt::TreeEnsemble& model, const FeatureMatrix& matrix,
                                 const std::vector<std::size_t>& rows);

// Stratified 70/20/10 split, then one training: fit on train, early-stop on
// validation. Returns the model plus the split used.
struct TrainOutcome {
    gbdt::TreeEnsemble model;
    SplitIndices split;
    gbdt::TrainLog log;
};
TrainOutcome train_point_model(const FeatureMatrix& matrix, const DaqiTable& daqi,
                               const gbdt::TrainParams& params, std::uint64_t seed);

// Per-station scores for one experiment protocol:
//   Baseline        - one model on the stratified split, scored per station
//                     on that station's held-out test rows.
//   WithinNetwork   - k-fold station holdout per network; held stations are
//                     scored on all their rows by the fold's model.
//   BetweenCountry / BetweenContinent - leave-one-group-out, scored on all
//                     rows of the held group's stations.
std::vector<StationScore> run_experiment(ExperimentKind kind, const FeatureMatrix& matrix,
                                         const std::vector<StationMeta>& stations,
                                         const DaqiTable& daqi, const gbdt::TrainParams& params,
                                         std::uint64_t seed, int kfold_k = 10);

double median_r2(const std::vector<StationScore>& scores);

}  // namespace airq
