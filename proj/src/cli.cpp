#include "airq/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "airq/config.hpp"
#include "airq/csv.hpp"
#include "airq/errors.hpp"
#include "airq/intervals.hpp"
#include "airq/manifest.hpp"
#include "airq/pipeline.hpp"
#include "airq/synthworld.hpp"
#include "airq/tile_infer.hpp"
#include "airq/tuner.hpp"

namespace airq::cli {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::string out_override;
    int threads = -1;  // -1 = use config
    std::int64_t seed_override = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "run configuration file");
    if (config_required) c->required();
    cmd->add_option("--out", opts.out_override, "output directory (overrides config)");
    cmd->add_option("--threads", opts.threads, "worker threads, 0 = hardware");
    cmd->add_option("--seed", opts.seed_override, "seed (overrides config)");
}

RunConfig load_config(const CommonOpts& opts) {
    RunConfig c = validate_config(opts.config_path);
    if (!opts.out_override.empty()) c.out = opts.out_override;
    if (opts.threads >= 0) c.threads = opts.threads;
    if (opts.seed_override >= 0) c.seed = static_cast<std::uint64_t>(opts.seed_override);
    return c;
}

// Referenced paths must exist at validation time; a missing key or file is a
// config error (exit 2), not a runtime failure.
void require_paths(const std::vector<std::pair<std::string, const std::string*>>& keys) {
    std::vector<std::string> problems;
    for (const auto& [key, value] : keys) {
        if (value->empty()) {
            problems.push_back("missing required key paths." + key);
        } else if (!fs::exists(*value)) {
            problems.push_back("paths." + key + " does not exist: " + *value);
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
}

void require_data_paths(const RunConfig& config, bool with_covariates) {
    std::vector<std::pair<std::string, const std::string*>> keys = {
        {"stations", &config.stations},
        {"measurements", &config.measurements},
        {"daqi", &config.daqi}};
    if (with_covariates) keys.push_back({"covariates", &config.covariates});
    require_paths(keys);
}

RunManifest start_manifest(const std::string& subcommand, const CommonOpts& opts,
                           const RunConfig& config) {
    RunManifest m;
    m.subcommand = subcommand;
    m.config_path = opts.config_path;
    m.config_hash = opts.config_path.empty() ? 0 : fnv1a_file(opts.config_path);
    m.seed = config.seed;
    m.threads = config.threads;
    m.tool_version = kToolVersion;
    return m;
}

std::string out_path(const RunConfig& config, const std::string& name) {
    fs::create_directories(config.out);
    return (fs::path(config.out) / name).string();
}

void finish(RunManifest& manifest, const RunConfig& config) {
    manifest.write(out_path(config, "manifest_" + manifest.subcommand + ".json"));
}

int run_qc(const CommonOpts& opts) {
    const RunConfig config = load_config(opts);
    require_data_paths(config, /*with_covariates=*/false);
    RunManifest manifest = start_manifest("qc", opts, config);
    const PipelineData data = load_pipeline_data(config, /*with_features=*/false);

    const std::string report_path = out_path(config, "qc_report.csv");
    write_qc_report(data.qc_report, report_path);
    manifest.add_output(report_path);

    const std::string kept_path = out_path(config, "kept_stations.csv");
    {
        std::ofstream out(kept_path);
        out << "station_id,pollutant,samples,min,max,mean,distinct,first,last\n";
        for (const auto& s : data.series) {
            const StationSummary sum = station_summary(s);
            out << csv::join_record({s.station.station_id, to_string(s.station.pollutant),
                                     std::to_string(sum.count), csv::format_double(sum.min),
                                     csv::format_double(sum.max), csv::format_double(sum.mean),
                                     std::to_string(sum.distinct), format_rfc3339(sum.first),
                                     format_rfc3339(sum.last)})
                << "\n";
        }
    }
    manifest.add_output(kept_path);
    finish(manifest, config);
    std::cout << "qc: kept " << data.qc_report.kept << ", rejected "
              << data.qc_report.rejected.size() << "\n";
    return 0;
}

int run_features(const CommonOpts& opts) {
    const RunConfig config = load_config(opts);
    require_data_paths(config, /*with_covariates=*/true);
    RunManifest manifest = start_manifest("features", opts, config);
    const PipelineData data = load_pipeline_data(config);
    const std::string path = out_path(config, "features.csv");
    write_feature_matrix(data.matrix, path);
    manifest.add_output(path);
    finish(manifest, config);
    std::cout << "features: " << data.matrix.size() << " rows x " << kNumFeatures
              << " features\n";
    return 0;
}

int run_split(const CommonOpts& opts) {
    const RunConfig config = load_config(opts);
    require_data_paths(config, /*with_covariates=*/true);
    RunManifest manifest = start_manifest("split", opts, config);
    const PipelineData data = load_pipeline_data(config);
    const SplitIndices split = stratified_split(data.matrix, data.daqi, config.seed);
    const std::string path = out_path(config, "split.csv");
    write_split_indices(split, path);
    manifest.add_output(path);
    finish(manifest, config);
    std::cout << "split: " << split.train.size() << " train, " << split.validation.size()
              << " validation, " << split.test.size() << " test\n";
    return 0;
}

int run_train(const CommonOpts& opts) {
    const RunConfig config = load_config(opts);
    require_data_paths(config, /*with_covariates=*/true);
    RunManifest manifest = start_manifest("train", opts, config);
    const PipelineData data = load_pipeline_data(config);

    TrainOutcome outcome = train_point_model(data.matrix, data.daqi, config.train, config.seed);
    outcome.model.pollutant = to_string(config.pollutant);

    const std::string model_path = out_path(config, "model.json");
    gbdt::save_model(outcome.model, model_path);
    manifest.add_output(model_path);

    const std::string split_path = out_path(config, "split.csv");
    write_split_indices(outcome.split, split_path);
    manifest.add_output(split_path);

    const std::string log_path = out_path(config, "training_log.csv");
    {
        std::ofstream out(log_path);
        out << "round,train_loss,valid_loss\n";
        for (std::size_t i = 0; i < outcome.log.train_loss.size(); ++i) {
            out << (i + 1) << ',' << outcome.log.train_loss[i] << ','
                << outcome.log.valid_loss[i] << "\n";
        }
    }
    manifest.add_output(log_path);
    finish(manifest, config);
    std::cout << "train: " << outcome.model.trees.size() << " trees, best iteration "
              << outcome.model.best_iteration << "\n";
    return 0;
}

int run_tune(const CommonOpts& opts) {
    const RunConfig config = load_config(opts);
    require_data_paths(config, /*with_covariates=*/true);
    RunManifest manifest = start_manifest("tune", opts, config);
    const PipelineData data = load_pipeline_data(config);

    const SplitIndices split = stratified_split(data.matrix, data.daqi, config.seed);
    if (split.validation.empty()) throw ValidationError("tune: empty validation set");
    const auto train_set = bin_rows(data.matrix, split.train, config.train.max_bin);
    const auto valid_set = bin_rows_with_edges(data.matrix, split.validation, train_set.bin_edges);

    const auto candidates = sample_param_sets(config.search, config.tune_candidates, config.seed);
    std::vector<TuneResult> results;
    std::vector<gbdt::TreeEnsemble> models;
    for (const auto& candidate : candidates) {
        gbdt::TrainParams p = candidate;
        p.seed = config.seed;
        models.push_back(gbdt::train(p, train_set, valid_set));
        // Selection metric matches early stopping: squared error in
        // transformed space on the validation rows.
        double mse = 0.0;
        for (const std::size_t row : split.validation) {
            const double z = models.back().predict_raw_score(data.matrix[row].features.data());
            const double d = z - gbdt::transform_target(data.matrix[row].target);
            mse += d * d;
        }
        mse /= static_cast<double>(split.validation.size());
        results.push_back(TuneResult{p, mse});
    }
    const std::size_t best_idx = select_best_index(results);
    gbdt::TreeEnsemble best_model = std::move(models[best_idx]);
    best_model.pollutant = to_string(config.pollutant);

    const std::string report_path = out_path(config, "tuning_report.csv");
    write_tuning_report(results, best_idx, report_path);
    manifest.add_output(report_path);
    const std::string model_path = out_path(config, "model_best.json");
    gbdt::save_model(best_model, model_path);
    manifest.add_output(model_path);
    finish(manifest, config);
    std::cout << "tune: candidate " << best_idx << " selected (val_mse "
              << results[best_idx].validation_mse << ")\n";
    return 0;
}

int run_experiment_cmd(const CommonOpts& opts, const std::string& kind_name) {
    const RunConfig config = load_config(opts);
    require_data_paths(config, /*with_covariates=*/true);
    const ExperimentKind kind = experiment_from_string(kind_name);
    RunManifest manifest = start_manifest("experiment_" + kind_name, opts, config);
    const PipelineData data = load_pipeline_data(config);

    // The fold plans the experiment will derive, written for inspection.
    if (kind == ExperimentKind::WithinNetwork) {
        const FoldPlan plan = within_network_kfold(data.stations, config.kfold_k, config.seed);
        const std::string plan_path = out_path(config, "fold_plan_" + kind_name + ".csv");
        write_fold_plan(plan, plan_path);
        manifest.add_output(plan_path);
    } else if (kind != ExperimentKind::Baseline) {
        const Grouping grouping =
            kind == ExperimentKind::BetweenCountry ? Grouping::Country : Grouping::Continent;
        for (const FoldPlan& plan : leave_group_out(data.stations, grouping)) {
            const std::string plan_path =
                out_path(config, "fold_plan_" + kind_name + "_" + plan.held_group + ".csv");
            write_fold_plan(plan, plan_path);
            manifest.add_output(plan_path);
        }
    }

    const std::vector<StationScore> scores = run_experiment(
        kind, data.matrix, data.stations, data.daqi, config.train, config.seed, config.kfold_k);

    const std::string scores_path = out_path(config, "scores_" + kind_name + ".csv");
    write_scores_csv(scores, scores_path);
    manifest.add_output(scores_path);

    const std::string table_path = out_path(config, "continent_table_" + kind_name + ".csv");
    write_continent_table({positive_r2_table(config.pollutant, scores)}, table_path);
    manifest.add_output(table_path);
    finish(manifest, config);

    std::cout << "experiment " << kind_name << ": " << scores.size() << " stations scored";
    if (!scores.empty()) std::cout << ", median R2 " << median_r2(scores);
    std::cout << "\n";
    return 0;
}

int run_intervals(const CommonOpts& opts) {
    const RunConfig config = load_config(opts);
    require_data_paths(config, /*with_covariates=*/true);
    RunManifest manifest = start_manifest("intervals", opts, config);
    const PipelineData data = load_pipeline_data(config);

    const SplitIndices split = stratified_split(data.matrix, data.daqi, config.seed);
    if (split.validation.empty()) throw ValidationError("intervals: empty validation set");
    const auto train_set = bin_rows(data.matrix, split.train, config.train.max_bin);
    const auto valid_set = bin_rows_with_edges(data.matrix, split.validation, train_set.bin_edges);
    gbdt::TrainParams p = config.train;
    p.seed = config.seed;
    const QuantileTriplet triplet = train_triplet(p, train_set, valid_set);

    for (const auto& [name, model] :
         std::initializer_list<std::pair<const char*, const gbdt::TreeEnsemble*>>{
             {"model_q05.json", &triplet.q05},
             {"model_q50.json", &triplet.q50},
             {"model_q95.json", &triplet.q95}}) {
        const std::string path = out_path(config, name);
        gbdt::save_model(*model, path);
        manifest.add_output(path);
    }

    const std::string intervals_path = out_path(config, "intervals_test.csv");
    std::size_t covered = 0;
    {
        std::ofstream out(intervals_path);
        out << "station_id,timestamp_utc,observed,lo,mid,hi\n";
        for (std::size_t row : split.test) {
            const FeatureRow& r = data.matrix[row];
            const IntervalPrediction iv = predict_interval(
                triplet, std::vector<double>(r.features.begin(), r.features.end()));
            if (r.target >= iv.lo && r.target <= iv.hi) ++covered;
            out << r.station_id << ',' << format_rfc3339(r.timestamp) << ',' << r.target << ','
                << iv.lo << ',' << iv.mid << ',' << iv.hi << "\n";
        }
    }
    manifest.add_output(intervals_path);
    finish(manifest, config);
    if (!split.test.empty()) {
        std::cout << "intervals: empirical coverage "
                  << static_cast<double>(covered) / static_cast<double>(split.test.size())
                  << " on " << split.test.size() << " test rows\n";
    }
    return 0;
}

int run_predict_grid(const CommonOpts& opts, const std::string& model_path,
                     const std::string& q05_path, const std::string& q50_path,
                     const std::string& q95_path, bool csv_export) {
    const RunConfig config = load_config(opts);
    RunManifest manifest = start_manifest("predict_grid", opts, config);
    if (config.grid_times.empty()) {
        throw ConfigError("predict-grid: grid.times is empty in the config");
    }
    const CovariateSourceSet sources = CovariateSourceSet::from_dir(config.covariates);
    const GridSpec spec = GridSpec::global_quarter_degree();

    struct Job {
        gbdt::TreeEnsemble model;
        TileKind kind;
        const char* tag;
    };
    std::vector<Job> jobs;
    if (config.grid_kinds == "point") {
        if (model_path.empty()) throw ConfigError("predict-grid: --model is required");
        jobs.push_back({gbdt::load_model(model_path), TileKind::Point, "point"});
    } else {
        if (q05_path.empty() || q50_path.empty() || q95_path.empty()) {
            throw ConfigError("predict-grid: --q05/--q50/--q95 are required for intervals");
        }
        jobs.push_back({gbdt::load_model(q05_path), TileKind::Q05, "q05"});
        jobs.push_back({gbdt::load_model(q50_path), TileKind::Q50, "q50"});
        jobs.push_back({gbdt::load_model(q95_path), TileKind::Q95, "q95"});
    }

    for (const UtcHour t : config.grid_times) {
        std::string stamp = format_rfc3339(t);
        for (char& c : stamp) {
            if (c == ':') c = '-';
        }
        for (const Job& job : jobs) {
            const PredictionTile tile =
                predict_tile(job.model, sources, t, spec, job.kind, config.threads);
            const std::string path =
                out_path(config, std::string("tile_") + job.tag + "_" + stamp + ".aptile");
            write_tile(tile, path);
            manifest.add_output(path);
            if (csv_export) {
                const std::string csv_path =
                    out_path(config, std::string("tile_") + job.tag + "_" + stamp + ".csv");
                write_tile_csv(tile, csv_path);
                manifest.add_output(csv_path);
            }
            std::cout << "predict-grid: " << path << " completeness " << tile.completeness()
                      << "\n";
        }
    }
    finish(manifest, config);
    return 0;
}

int run_aqi(const CommonOpts& opts, const std::string& tiles_dir) {
    const RunConfig config = load_config(opts);
    RunManifest manifest = start_manifest("aqi", opts, config);
    const DaqiTable daqi = DaqiTable::from_csv(config.daqi);
    const GridSpec spec = GridSpec::global_quarter_degree();

    // Group the point tiles by pollutant, convert to hourly subindex tiles.
    std::map<Pollutant, std::vector<PredictionTile>> index_tiles;
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(tiles_dir)) {
        if (entry.path().extension() == ".aptile") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    for (const auto& path : paths) {
        const PredictionTile tile = read_tile(path.string(), spec);
        if (tile.kind != TileKind::Point) continue;
        index_tiles[tile.pollutant].push_back(subindex_tile(tile, daqi));
    }
    if (index_tiles.empty()) {
        throw ConfigError("aqi: no point tiles found in " + tiles_dir);
    }

    std::vector<PredictionTile> summations;
    for (const Pollutant p : all_pollutants()) {
        const auto it = index_tiles.find(p);
        if (it == index_tiles.end()) continue;
        PredictionTile sum = annual_summation(it->second);
        const std::string path = out_path(config, "index_sum_" + to_string(p) + ".aptile");
        write_tile(sum, path);
        manifest.add_output(path);
        summations.push_back(std::move(sum));
    }

    // Hourly overall index needs every pollutant present for the hour; group
    // subindex tiles by timestamp.
    std::map<UtcHour, std::vector<PredictionTile>> by_time;
    for (const auto& [p, tiles] : index_tiles) {
        for (const auto& t : tiles) by_time[t.timestamp].push_back(t);
    }
    for (const auto& [t, tiles] : by_time) {
        PredictionTile overall = overall_index_tile(tiles);
        std::string stamp = format_rfc3339(t);
        for (char& c : stamp) {
            if (c == ':') c = '-';
        }
        const std::string path = out_path(config, "overall_index_" + stamp + ".aptile");
        write_tile(overall, path);
        manifest.add_output(path);
    }

    if (summations.size() > 1) {
        const PredictionTile driving = driving_subindex(summations);
        const std::string path = out_path(config, "driving_subindex.aptile");
        write_tile(driving, path);
        manifest.add_output(path);
    }
    finish(manifest, config);
    std::cout << "aqi: " << by_time.size() << " hours, " << summations.size()
              << " pollutant summations\n";
    return 0;
}

int run_report(const CommonOpts& opts, const std::vector<std::string>& score_files,
               const std::string& lo_tiles_dir) {
    const RunConfig config = load_config(opts);
    RunManifest manifest = start_manifest("report", opts, config);

    // Continent assignment comes from the station inventory; the scores CSV
    // stores only ids.
    std::map<std::string, Continent> continent_of;
    for (const StationMeta& s : parse_station_file(config.stations)) {
        continent_of[s.station_id] = s.continent;
    }

    std::vector<StationScore> all_scores;
    for (const std::string& file : score_files) {
        for (StationScore s : read_scores_csv(file)) {
            const auto it = continent_of.find(s.station_id);
            if (it != continent_of.end()) s.continent = it->second;
            all_scores.push_back(std::move(s));
        }
    }
    if (all_scores.empty()) throw ConfigError("report: no scores supplied (--scores)");

    std::vector<ContinentTableRow> table_rows;
    table_rows.push_back(positive_r2_table(config.pollutant, all_scores));
    const std::string table_path = out_path(config, "continent_table.csv");
    write_continent_table(table_rows, table_path);
    manifest.add_output(table_path);

    // 90% IQR of bias and correlation per experiment, the Table-5 shape.
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_experiment;
    for (const auto& s : all_scores) {
        by_experiment[s.experiment].first.push_back(s.bias);
        if (s.pearson) by_experiment[s.experiment].second.push_back(*s.pearson);
    }
    const std::string iqr_path = out_path(config, "iqr_table.csv");
    {
        std::ofstream out(iqr_path);
        out << "experiment,bias_p05,bias_p95,bias_iqr90,corr_p05,corr_p95,corr_iqr90\n";
        for (const auto& [experiment, series] : by_experiment) {
            const Iqr90 b = iqr90(series.first);
            out << experiment << ',' << b.p05 << ',' << b.p95 << ',' << b.width;
            if (!series.second.empty()) {
                const Iqr90 c = iqr90(series.second);
                out << ',' << c.p05 << ',' << c.p95 << ',' << c.width << "\n";
            } else {
                out << ",undefined,undefined,undefined\n";
            }
        }
    }
    manifest.add_output(iqr_path);

    // Optional placement ranking from interval tiles (q05/q95 pairs).
    if (!lo_tiles_dir.empty()) {
        const GridSpec spec = GridSpec::global_quarter_degree();
        std::map<UtcHour, std::pair<const PredictionTile*, const PredictionTile*>> paired;
        std::vector<PredictionTile> storage;
        std::vector<fs::path> paths;
        for (const auto& entry : fs::directory_iterator(lo_tiles_dir)) {
            if (entry.path().extension() == ".aptile") paths.push_back(entry.path());
        }
        std::sort(paths.begin(), paths.end());
        storage.reserve(paths.size());
        for (const auto& p : paths) {
            PredictionTile t = read_tile(p.string(), spec);
            if (t.kind != TileKind::Q05 && t.kind != TileKind::Q95) continue;
            storage.push_back(std::move(t));
        }
        for (const auto& t : storage) {
            auto& pair = paired[t.timestamp];
            (t.kind == TileKind::Q05 ? pair.first : pair.second) = &t;
        }
        std::vector<std::pair<PredictionTile, PredictionTile>> pairs;
        for (const auto& [t, pair] : paired) {
            if (pair.first && pair.second) pairs.push_back({*pair.first, *pair.second});
        }
        if (!pairs.empty()) {
            const auto ranking = interval_size_sum(pairs, 100);
            const std::string rank_path = out_path(config, "placement_ranking.csv");
            write_ranking_csv(ranking, rank_path);
            manifest.add_output(rank_path);
        }
    }
    finish(manifest, config);
    std::cout << "report: " << all_scores.size() << " scores aggregated\n";
    return 0;
}

int run_fixture(const std::string& out_dir, int stations_per_country, int days,
                std::uint64_t seed, bool adversarial, bool csv_grids, double met_res) {
    SynthWorldOptions opt;
    opt.stations_per_country = stations_per_country;
    opt.days = days;
    opt.seed = seed;
    opt.include_adversarial = adversarial;
    if (met_res > 0.0) {
        opt.met_dlat = met_res;
        opt.met_dlon = met_res;
    }
    const SynthWorld world = make_synth_world(opt);
    write_synth_world(world, out_dir, csv_grids);

    RunManifest manifest;
    manifest.subcommand = "fixture";
    manifest.seed = seed;
    manifest.tool_version = kToolVersion;
    manifest.params = {{"stations_per_country", std::to_string(stations_per_country)},
                       {"days", std::to_string(days)},
                       {"adversarial", adversarial ? "true" : "false"},
                       {"csv_grids", csv_grids ? "true" : "false"},
                       {"met_dlat", csv::format_double(opt.met_dlat)},
                       {"met_dlon", csv::format_double(opt.met_dlon)}};
    for (const char* name : {"stations.csv", "measurements.csv", "daqi.csv", "run.toml"}) {
        manifest.add_output((fs::path(out_dir) / name).string());
    }
    for (const auto& entry : fs::directory_iterator(fs::path(out_dir) / "covariates")) {
        manifest.add_output(entry.path().string());
    }
    manifest.write((fs::path(out_dir) / "manifest_fixture.json").string());

    std::cout << "fixture: " << world.stations.size() << " stations, " << days << " days -> "
              << out_dir << "\n";
    return 0;
}

}  // namespace

int execute(const std::vector<std::string>& argv) {
    CLI::App app{"global air pollution estimation pipeline"};
    app.require_subcommand(1);

    CommonOpts qc_opts, feat_opts, split_opts, train_opts, tune_opts, exp_opts, int_opts,
        grid_opts, aqi_opts, report_opts;

    auto* qc_cmd = app.add_subcommand("qc", "parse stations/measurements and apply QC rules");
    add_common(qc_cmd, qc_opts);

    auto* feat_cmd = app.add_subcommand("features", "assemble the 26-feature matrix");
    add_common(feat_cmd, feat_opts);

    auto* split_cmd = app.add_subcommand("split", "DAQI-stratified 70/20/10 split");
    add_common(split_cmd, split_opts);

    auto* train_cmd = app.add_subcommand("train", "train the point model");
    add_common(train_cmd, train_opts);

    auto* tune_cmd = app.add_subcommand("tune", "randomized hyperparameter search");
    add_common(tune_cmd, tune_opts);

    std::string experiment_kind;
    auto* exp_cmd = app.add_subcommand("experiment", "run a spatial generalization experiment");
    exp_cmd->add_option("kind", experiment_kind,
                        "baseline | within-network | between-country | between-continent")
        ->required()
        ->check(CLI::IsMember(
            {"baseline", "within-network", "between-country", "between-continent"}));
    add_common(exp_cmd, exp_opts);

    auto* int_cmd = app.add_subcommand("intervals", "train the 0.05/0.5/0.95 quantile triplet");
    add_common(int_cmd, int_opts);

    std::string model_path, q05_path, q50_path, q95_path;
    bool grid_csv = false;
    auto* grid_cmd = app.add_subcommand("predict-grid", "render global 0.25 degree tiles");
    add_common(grid_cmd, grid_opts);
    grid_cmd->add_option("--model", model_path, "point model file");
    grid_cmd->add_option("--q05", q05_path, "0.05 quantile model");
    grid_cmd->add_option("--q50", q50_path, "0.5 quantile model");
    grid_cmd->add_option("--q95", q95_path, "0.95 quantile model");
    grid_cmd->add_flag("--csv", grid_csv, "also export lat,lon,value CSVs");

    std::string aqi_tiles_dir;
    auto* aqi_cmd = app.add_subcommand("aqi", "derive DAQI products from concentration tiles");
    add_common(aqi_cmd, aqi_opts);
    aqi_cmd->add_option("--tiles", aqi_tiles_dir, "directory of point tiles")->required();

    std::vector<std::string> score_files;
    std::string interval_tiles_dir;
    auto* report_cmd = app.add_subcommand("report", "aggregate scores into summary tables");
    add_common(report_cmd, report_opts);
    report_cmd->add_option("--scores", score_files, "scores CSV files")->required();
    report_cmd->add_option("--interval-tiles", interval_tiles_dir,
                           "directory of q05/q95 tiles for placement ranking");

    std::string fixture_out = "fixture";
    int fixture_stations = 5, fixture_days = 30;
    std::uint64_t fixture_seed = 7;
    bool fixture_adversarial = false, fixture_csv_grids = false;
    double fixture_met_res = 0.0;
    auto* fix_cmd = app.add_subcommand("fixture", "generate a synthetic world");
    fix_cmd->add_option("--out", fixture_out, "output directory");
    fix_cmd->add_option("--stations-per-country", fixture_stations, "stations per country (4 countries)");
    fix_cmd->add_option("--days", fixture_days, "days of hourly data");
    fix_cmd->add_option("--seed", fixture_seed, "generator seed");
    fix_cmd->add_flag("--adversarial", fixture_adversarial, "include the 12-station QC fixture");
    fix_cmd->add_flag("--csv-grids", fixture_csv_grids, "write text grids instead of binary");
    fix_cmd->add_option("--met-resolution", fixture_met_res,
                        "degrees per hourly-grid cell (default 12)");

    auto* config_cmd = app.add_subcommand("config-reference", "print the annotated config schema");

    std::vector<std::string> args = argv;
    std::reverse(args.begin(), args.end());  // CLI11 consumes in reverse
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (qc_cmd->parsed()) return run_qc(qc_opts);
        if (feat_cmd->parsed()) return run_features(feat_opts);
        if (split_cmd->parsed()) return run_split(split_opts);
        if (train_cmd->parsed()) return run_train(train_opts);
        if (tune_cmd->parsed()) return run_tune(tune_opts);
        if (exp_cmd->parsed()) return run_experiment_cmd(exp_opts, experiment_kind);
        if (int_cmd->parsed()) return run_intervals(int_opts);
        if (grid_cmd->parsed()) {
            return run_predict_grid(grid_opts, model_path, q05_path, q50_path, q95_path, grid_csv);
        }
        if (aqi_cmd->parsed()) return run_aqi(aqi_opts, aqi_tiles_dir);
        if (report_cmd->parsed()) {
            return run_report(report_opts, score_files, interval_tiles_dir);
        }
        if (fix_cmd->parsed()) {
            return run_fixture(fixture_out, fixture_stations, fixture_days, fixture_seed,
                               fixture_adversarial, fixture_csv_grids, fixture_met_res);
        }
        if (config_cmd->parsed()) {
            std::cout << config_reference();
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace airq::cli
