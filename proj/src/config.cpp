#include "airq/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "airq/csv.hpp"
#include "airq/errors.hpp"
#include "airq/time.hpp"

namespace airq {

namespace {

struct RawConfig {
    std::map<std::string, std::string> values;  // "section.key" -> raw text
    std::vector<std::string> problems;
};

// Minimal INI-style reader: [section], key = value, '#' comments. Values keep
// their raw text; typed parsing happens against the schema below.
RawConfig read_raw(const std::string& path) {
    RawConfig raw;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                raw.problems.push_back("line " + std::to_string(lineno) + ": unterminated section");
                continue;
            }
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            raw.problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (raw.values.count(full)) {
            raw.problems.push_back("duplicate key: " + full);
            continue;
        }
        raw.values[full] = value;
    }
    return raw;
}

class SchemaReader {
public:
    SchemaReader(RawConfig raw) : raw_(std::move(raw)) { problems_ = raw_.problems; }

    std::optional<std::string> take(const std::string& key) {
        known_.insert(key);
        const auto it = raw_.values.find(key);
        if (it == raw_.values.end()) return std::nullopt;
        return it->second;
    }

    template <typename F>
    void typed(const std::string& key, F&& apply) {
        const auto v = take(key);
        if (!v) return;
        try {
            apply(*v);
        } catch (const std::exception& e) {
            problems_.push_back(key + ": " + e.what());
        }
    }

    void finish() {
        for (const auto& [key, _] : raw_.values) {
            if (!known_.count(key)) problems_.push_back("unknown key: " + key);
        }
    }

    void problem(const std::string& p) { problems_.push_back(p); }
    const std::vector<std::string>& problems() const { return problems_; }

private:
    RawConfig raw_;
    std::set<std::string> known_;
    std::vector<std::string> problems_;
};

}  // namespace

RunConfig validate_config(const std::string& path) {
    SchemaReader reader(read_raw(path));
    RunConfig c;

    reader.typed("paths.stations", [&](const std::string& v) { c.stations = v; });
    reader.typed("paths.measurements", [&](const std::string& v) { c.measurements = v; });
    reader.typed("paths.covariates", [&](const std::string& v) { c.covariates = v; });
    reader.typed("paths.daqi", [&](const std::string& v) { c.daqi = v; });
    reader.typed("paths.offsets", [&](const std::string& v) { c.offsets = v; });
    reader.typed("paths.out", [&](const std::string& v) { c.out = v; });

    reader.typed("run.pollutant", [&](const std::string& v) { c.pollutant = pollutant_from_string(v); });
    reader.typed("run.seed", [&](const std::string& v) { c.seed = csv::parse_uint(v); });
    reader.typed("run.threads", [&](const std::string& v) { c.threads = static_cast<int>(csv::parse_int(v)); });

    auto& t = c.train;
    reader.typed("train.num_leaves", [&](const std::string& v) { t.num_leaves = static_cast<int>(csv::parse_int(v)); });
    reader.typed("train.min_data_in_leaf", [&](const std::string& v) { t.min_data_in_leaf = static_cast<int>(csv::parse_int(v)); });
    reader.typed("train.lambda_l2", [&](const std::string& v) { t.lambda_l2 = csv::parse_double(v); });
    reader.typed("train.learning_rate", [&](const std::string& v) { t.learning_rate = csv::parse_double(v); });
    reader.typed("train.max_trees", [&](const std::string& v) { t.max_trees = static_cast<int>(csv::parse_int(v)); });
    reader.typed("train.early_stopping_rounds", [&](const std::string& v) {
        t.early_stopping_rounds = static_cast<int>(csv::parse_int(v));
    });
    reader.typed("train.goss_top_rate", [&](const std::string& v) { t.goss_top_rate = csv::parse_double(v); });
    reader.typed("train.goss_other_rate", [&](const std::string& v) { t.goss_other_rate = csv::parse_double(v); });
    reader.typed("train.max_bin", [&](const std::string& v) {
        t.max_bin = static_cast<int>(csv::parse_int(v));
        if (t.max_bin != 63) throw ValidationError("max_bin is fixed at 63");
    });
    reader.typed("train.loss", [&](const std::string& v) {
        if (v == "mse_log") t.loss = gbdt::LossKind::MseLog;
        else if (v == "pinball") t.loss = gbdt::LossKind::Pinball;
        else throw ValidationError("loss must be mse_log or pinball");
    });
    reader.typed("train.quantile", [&](const std::string& v) { t.quantile = csv::parse_double(v); });

    reader.typed("tune.candidates", [&](const std::string& v) { c.tune_candidates = static_cast<int>(csv::parse_int(v)); });
    reader.typed("tune.num_leaves_min", [&](const std::string& v) { c.search.num_leaves_min = static_cast<int>(csv::parse_int(v)); });
    reader.typed("tune.num_leaves_max", [&](const std::string& v) { c.search.num_leaves_max = static_cast<int>(csv::parse_int(v)); });
    reader.typed("tune.min_data_in_leaf_min", [&](const std::string& v) { c.search.min_data_in_leaf_min = static_cast<int>(csv::parse_int(v)); });
    reader.typed("tune.min_data_in_leaf_max", [&](const std::string& v) { c.search.min_data_in_leaf_max = static_cast<int>(csv::parse_int(v)); });
    reader.typed("tune.lambda_l2_min", [&](const std::string& v) { c.search.lambda_l2_min = csv::parse_double(v); });
    reader.typed("tune.lambda_l2_max", [&](const std::string& v) { c.search.lambda_l2_max = csv::parse_double(v); });

    reader.typed("experiment.kfold_k", [&](const std::string& v) { c.kfold_k = static_cast<int>(csv::parse_int(v)); });

    reader.typed("grid.times", [&](const std::string& v) {
        for (const std::string& tok : csv::split_record(v)) {
            c.grid_times.push_back(parse_rfc3339_hour(tok));
        }
    });
    reader.typed("grid.kinds", [&](const std::string& v) {
        if (v != "point" && v != "intervals") {
            throw ValidationError("grid.kinds must be point or intervals");
        }
        c.grid_kinds = v;
    });

    reader.finish();

    c.search.base = c.train;
    try {
        c.train.validate();
    } catch (const ValidationError& e) {
        reader.problem(std::string("train: ") + e.what());
    }

    if (!reader.problems().empty()) {
        std::string msg = "config errors in " + path + ":";
        for (const auto& p : reader.problems()) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return c;
}

std::string config_reference() {
    return R"([paths]
stations = "stations.csv"        # required by qc/features/experiment
measurements = "measurements.csv"
covariates = "covariates"        # directory of *.covgrid / *.csv grids
daqi = "daqi.csv"                # DAQI band table (default UK DEFRA values)
offsets = ""                     # optional station_id,utc_offset_hours CSV
out = "out"                      # output directory (--out overrides)

[run]
pollutant = "NO2"                # NO2 | O3 | PM10 | PM2_5 | SO2
seed = 42
threads = 0                      # 0 = hardware concurrency

[train]
num_leaves = 31                  # [2, 4095]
min_data_in_leaf = 20
lambda_l2 = 0.0
learning_rate = 0.1
max_trees = 500
early_stopping_rounds = 10
goss_top_rate = 0.2
goss_other_rate = 0.1
max_bin = 63                     # fixed; other values are rejected
loss = "mse_log"                 # mse_log | pinball
quantile = 0.5                   # pinball only

[tune]
candidates = 5
num_leaves_min = 1000
num_leaves_max = 4095
min_data_in_leaf_min = 20
min_data_in_leaf_max = 200
lambda_l2_min = 0.001            # log-uniform
lambda_l2_max = 10.0

[experiment]
kfold_k = 10

[grid]
times = "2022-01-02T08:00:00Z"   # comma-separated RFC-3339 hours
kinds = "point"                  # point | intervals
)";
}

}  // namespace airq
