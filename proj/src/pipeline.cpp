#include "airq/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "airq/csv.hpp"
#include "airq/errors.hpp"
#include "airq/stats.hpp"

namespace airq {

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Baseline: return "baseline";
        case ExperimentKind::WithinNetwork: return "within-network";
        case ExperimentKind::BetweenCountry: return "between-country";
        case ExperimentKind::BetweenContinent: return "between-continent";
    }
    return "?";
}

ExperimentKind experiment_from_string(const std::string& s) {
    for (ExperimentKind k : {ExperimentKind::Baseline, ExperimentKind::WithinNetwork,
                             ExperimentKind::BetweenCountry, ExperimentKind::BetweenContinent}) {
        if (s == to_string(k)) return k;
    }
    throw ValidationError("unknown experiment: '" + s + "'");
}

PipelineData load_pipeline_data(const RunConfig& config, bool with_features) {
    PipelineData data;
    data.daqi = DaqiTable::from_csv(config.daqi);

    const auto all_stations = parse_station_file(config.stations);
    const auto all_series = parse_measurement_file(config.measurements, all_stations);

    std::vector<MeasurementSeries> pollutant_series;
    for (const auto& s : all_series) {
        if (s.station.pollutant == config.pollutant) pollutant_series.push_back(s);
    }
    auto [kept, report] = apply_qc(pollutant_series, QcRuleSet::all());
    data.series = std::move(kept);
    data.qc_report = std::move(report);
    for (const auto& s : data.series) data.stations.push_back(s.station);

    if (with_features) {
        data.sources = CovariateSourceSet::from_dir(config.covariates);
        if (!data.sources.complete()) {
            std::string names;
            for (const auto& n : data.sources.missing_names()) names += " " + n;
            throw ConfigError("covariate directory is missing grids:" + names);
        }
        if (!config.offsets.empty()) {
            const auto rows = csv::read_file(config.offsets);
            if (rows.empty() ||
                rows[0] != std::vector<std::string>{"station_id", "utc_offset_hours"}) {
                throw ParseError(config.offsets +
                                 ": expected header station_id,utc_offset_hours");
            }
            for (std::size_t i = 1; i < rows.size(); ++i) {
                data.sources.set_offset_override(
                    rows[i][0], static_cast<int>(csv::parse_int(rows[i][1])));
            }
        }
        data.matrix = build_feature_matrix(data.series, data.sources);
    }
    return data;
}

namespace {

std::vector<std::vector<double>> columns_for(const FeatureMatrix& matrix,
                                             const std::vector<std::size_t>& rows) {
    std::vector<std::vector<double>> columns(kNumFeatures);
    for (auto& c : columns) c.reserve(rows.size());
    for (std::size_t r : rows) {
        for (int f = 0; f < kNumFeatures; ++f) columns[static_cast<std::size_t>(f)].push_back(matrix[r].features[static_cast<std::size_t>(f)]);
    }
    return columns;
}

std::vector<double> targets_for(const FeatureMatrix& matrix,
                                const std::vector<std::size_t>& rows) {
    std::vector<double> t;
    t.reserve(rows.size());
    for (std::size_t r : rows) t.push_back(matrix[r].target);
    return t;
}

}  // namespace

gbdt::BinnedDataset bin_rows(const FeatureMatrix& matrix, const std::vector<std::size_t>& rows,
                             int max_bins) {
    return gbdt::bin_features(columns_for(matrix, rows), targets_for(matrix, rows),
                              gbdt::TransformKind::LogPlusEps, max_bins);
}

gbdt::BinnedDataset bin_rows_with_edges(const FeatureMatrix& matrix,
                                        const std::vector<std::size_t>& rows,
                                        const std::vector<std::vector<double>>& edges) {
    return gbdt::bin_with_edges(columns_for(matrix, rows), targets_for(matrix, rows), edges,
                                gbdt::TransformKind::LogPlusEps);
}

std::vector<double> predict_rows(const gbdt::TreeEnsemble& model, const FeatureMatrix& matrix,
                                 const std::vector<std::size_t>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) {
        out.push_back(model.predict_unchecked(matrix[r].features.data()));
    }
    return out;
}

TrainOutcome train_point_model(const FeatureMatrix& matrix, const DaqiTable& daqi,
                               const gbdt::TrainParams& params, std::uint64_t seed) {
    TrainOutcome out;
    out.split = stratified_split(matrix, daqi, seed);
    if (out.split.validation.empty()) {
        throw ValidationError("train: stratified split produced an empty validation set");
    }
    const auto train_set = bin_rows(matrix, out.split.train, params.max_bin);
    const auto valid_set =
        bin_rows_with_edges(matrix, out.split.validation, train_set.bin_edges);
    gbdt::TrainParams p = params;
    p.seed = seed;
    out.model = gbdt::train(p, train_set, valid_set, &out.log);
    return out;
}

namespace {

// Scores each station over the given evaluation rows (grouped by station).
// Stations with fewer than two rows or constant observations cannot carry an
// R2 and are skipped.
void score_stations(const gbdt::TreeEnsemble& model, const FeatureMatrix& matrix,
                    const std::vector<std::size_t>& eval_rows, const std::string& experiment,
                    std::vector<StationScore>& out) {
    std::map<std::string, std::vector<std::size_t>> by_station;
    for (std::size_t r : eval_rows) by_station[matrix[r].station_id].push_back(r);
    for (const auto& [station_id, rows] : by_station) {
        std::vector<double> obs;
        obs.reserve(rows.size());
        for (std::size_t r : rows) obs.push_back(matrix[r].target);
        if (obs.size() < 2) continue;
        bool constant = true;
        for (double v : obs) constant = constant && v == obs.front();
        if (constant) continue;
        const std::vector<double> pred = predict_rows(model, matrix, rows);
        StationScore s;
        s.station_id = station_id;
        s.pollutant = matrix[rows.front()].pollutant;
        s.continent = matrix[rows.front()].continent;
        s.experiment = experiment;
        s.n = rows.size();
        s.r2 = r2_score(obs, pred);
        s.bias = bias(obs, pred);
        s.pearson = pearson(obs, pred);
        out.push_back(std::move(s));
    }
}

// Rows of every station assigned `label` in the plan.
std::vector<std::size_t> rows_for_label(const FeatureMatrix& matrix, const FoldPlan& plan,
                                        const std::string& label) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        const auto it = plan.assignments.find(matrix[i].station_id);
        if (it != plan.assignments.end() && it->second == label) rows.push_back(i);
    }
    return rows;
}

// Trains on the given station rows with an inner stratified split for early
// stopping, then scores the held rows.
void run_holdout_fold(const FeatureMatrix& matrix, const DaqiTable& daqi,
                      const gbdt::TrainParams& params, std::uint64_t seed,
                      const std::vector<std::size_t>& train_station_rows,
                      const std::vector<std::size_t>& held_rows, const std::string& experiment,
                      std::vector<StationScore>& scores) {
    if (train_station_rows.empty() || held_rows.empty()) return;

    FeatureMatrix train_matrix;
    train_matrix.reserve(train_station_rows.size());
    for (std::size_t r : train_station_rows) train_matrix.push_back(matrix[r]);
    const SplitIndices inner = stratified_split(train_matrix, daqi, seed);
    if (inner.validation.empty()) return;

    const auto train_set = bin_rows(train_matrix, inner.train, params.max_bin);
    const auto valid_set = bin_rows_with_edges(train_matrix, inner.validation, train_set.bin_edges);
    gbdt::TrainParams p = params;
    p.seed = seed;
    const gbdt::TreeEnsemble model = gbdt::train(p, train_set, valid_set);
    score_stations(model, matrix, held_rows, experiment, scores);
}

}  // namespace

std::vector<StationScore> run_experiment(ExperimentKind kind, const FeatureMatrix& matrix,
                                         const std::vector<StationMeta>& stations,
                                         const DaqiTable& daqi, const gbdt::TrainParams& params,
                                         std::uint64_t seed, int kfold_k) {
    std::vector<StationScore> scores;
    const std::string name = to_string(kind);

    if (kind == ExperimentKind::Baseline) {
        const TrainOutcome outcome = train_point_model(matrix, daqi, params, seed);
        score_stations(outcome.model, matrix, outcome.split.test, name, scores);
        return scores;
    }

    if (kind == ExperimentKind::WithinNetwork) {
        const FoldPlan plan = within_network_kfold(stations, kfold_k, seed);
        for (int f = 0; f < kfold_k; ++f) {
            const std::string held_label = "fold_" + std::to_string(f);
            const std::vector<std::size_t> held_rows = rows_for_label(matrix, plan, held_label);
            std::vector<std::size_t> train_rows;
            for (std::size_t i = 0; i < matrix.size(); ++i) {
                const auto it = plan.assignments.find(matrix[i].station_id);
                if (it != plan.assignments.end() && it->second != held_label) {
                    train_rows.push_back(i);
                }
            }
            run_holdout_fold(matrix, daqi, params, seed, train_rows, held_rows, name, scores);
        }
        return scores;
    }

    const Grouping grouping =
        kind == ExperimentKind::BetweenCountry ? Grouping::Country : Grouping::Continent;
    for (const FoldPlan& plan : leave_group_out(stations, grouping)) {
        if (plan.degenerate()) continue;
        const std::vector<std::size_t> train_rows = rows_for_label(matrix, plan, "train");
        const std::vector<std::size_t> held_rows = rows_for_label(matrix, plan, "test");
        run_holdout_fold(matrix, daqi, params, seed, train_rows, held_rows, name, scores);
    }
    return scores;
}

double median_r2(const std::vector<StationScore>& scores) {
    if (scores.empty()) throw ValidationError("median_r2: no scores");
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& s : scores) values.push_back(s.r2);
    return percentile_linear(std::move(values), 0.5);
}

}  // namespace airq
