#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "airq/errors.hpp"
#include "airq/gbdt.hpp"

namespace airq::gbdt {

namespace {

using nlohmann::json;

std::string loss_name(LossKind k) { return k == LossKind::MseLog ? "mse_log" : "pinball"; }

LossKind loss_from_name(const std::string& s) {
    if (s == "mse_log") return LossKind::MseLog;
    if (s == "pinball") return LossKind::Pinball;
    throw ParseError("unknown loss kind: '" + s + "'");
}

std::string transform_name(TransformKind k) {
    return k == TransformKind::LogPlusEps ? "log_plus_eps" : "identity";
}

TransformKind transform_from_name(const std::string& s) {
    if (s == "log_plus_eps") return TransformKind::LogPlusEps;
    if (s == "identity") return TransformKind::Identity;
    throw ParseError("unknown transform kind: '" + s + "'");
}

json params_to_json(const TrainParams& p) {
    return json{{"num_leaves", p.num_leaves},
                {"min_data_in_leaf", p.min_data_in_leaf},
                {"lambda_l2", p.lambda_l2},
                {"learning_rate", p.learning_rate},
                {"max_trees", p.max_trees},
                {"early_stopping_rounds", p.early_stopping_rounds},
                {"goss_top_rate", p.goss_top_rate},
                {"goss_other_rate", p.goss_other_rate},
                {"max_bin", p.max_bin},
                {"loss", loss_name(p.loss)},
                {"quantile", p.quantile},
                {"seed", p.seed}};
}

TrainParams params_from_json(const json& j) {
    TrainParams p;
    p.num_leaves = j.at("num_leaves").get<int>();
    p.min_data_in_leaf = j.at("min_data_in_leaf").get<int>();
    p.lambda_l2 = j.at("lambda_l2").get<double>();
    p.learning_rate = j.at("learning_rate").get<double>();
    p.max_trees = j.at("max_trees").get<int>();
    p.early_stopping_rounds = j.at("early_stopping_rounds").get<int>();
    p.goss_top_rate = j.at("goss_top_rate").get<double>();
    p.goss_other_rate = j.at("goss_other_rate").get<double>();
    p.max_bin = j.at("max_bin").get<int>();
    p.loss = loss_from_name(j.at("loss").get<std::string>());
    p.quantile = j.at("quantile").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

}  // namespace

double TreeEnsemble::predict_raw_score(const double* features) const {
    double score = base_score;
    for (int t = 0; t < best_iteration; ++t) {
        score += params.learning_rate * trees[static_cast<std::size_t>(t)].predict_raw(features);
    }
    return score;
}

double TreeEnsemble::predict_unchecked(const double* features) const {
    return invert_transform(transform, predict_raw_score(features));
}

double TreeEnsemble::predict(const std::vector<double>& features) const {
    if (static_cast<int>(features.size()) != n_features) {
        throw ValidationError("predict: expected " + std::to_string(n_features) + " features");
    }
    for (double v : features) {
        if (std::isnan(v)) throw ValidationError("predict: NaN feature value");
    }
    return predict_unchecked(features.data());
}

std::string serialize(const TreeEnsemble& e) {
    json j;
    j["version"] = e.version;
    j["pollutant"] = e.pollutant;
    j["loss"] = loss_name(e.loss);
    j["quantile"] = e.quantile;
    j["transform"] = transform_name(e.transform);
    j["params"] = params_to_json(e.params);
    j["n_features"] = e.n_features;
    j["base_score"] = e.base_score;
    j["best_iteration"] = e.best_iteration;
    j["bin_boundaries"] = e.bin_edges;
    json trees = json::array();
    for (const Tree& t : e.trees) {
        json nodes = json::array();
        for (const TreeNode& n : t.nodes) {
            if (n.is_leaf()) {
                nodes.push_back(json{{"v", n.leaf_value}});
            } else {
                nodes.push_back(json{{"f", n.feature},
                                     {"bin", n.split_bin},
                                     {"thr", n.threshold},
                                     {"dl", n.default_left},
                                     {"l", n.left},
                                     {"r", n.right}});
            }
        }
        trees.push_back(json{{"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    return j.dump();
}

TreeEnsemble deserialize(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(std::string("model decode failed: ") + e.what());
    }
    try {
        TreeEnsemble e;
        e.version = j.at("version").get<int>();
        if (e.version != 1) {
            throw ParseError("unsupported model version " + std::to_string(e.version));
        }
        e.pollutant = j.at("pollutant").get<std::string>();
        e.loss = loss_from_name(j.at("loss").get<std::string>());
        e.quantile = j.at("quantile").get<double>();
        e.transform = transform_from_name(j.at("transform").get<std::string>());
        e.params = params_from_json(j.at("params"));
        e.n_features = j.at("n_features").get<int>();
        e.base_score = j.at("base_score").get<double>();
        e.best_iteration = j.at("best_iteration").get<int>();
        e.bin_edges = j.at("bin_boundaries").get<std::vector<std::vector<double>>>();
        for (const json& tj : j.at("trees")) {
            Tree t;
            for (const json& nj : tj.at("nodes")) {
                TreeNode n;
                if (nj.contains("f")) {
                    n.feature = nj.at("f").get<int>();
                    n.split_bin = nj.at("bin").get<int>();
                    n.threshold = nj.at("thr").get<double>();
                    n.default_left = nj.at("dl").get<bool>();
                    n.left = nj.at("l").get<int>();
                    n.right = nj.at("r").get<int>();
                    if (n.feature < 0 || n.feature >= e.n_features) {
                        throw ParseError("model node references feature out of range");
                    }
                } else {
                    n.leaf_value = nj.at("v").get<double>();
                }
                t.nodes.push_back(n);
            }
            if (t.nodes.empty()) throw ParseError("model tree has no nodes");
            e.trees.push_back(std::move(t));
        }
        if (e.best_iteration < 0 || e.best_iteration > static_cast<int>(e.trees.size())) {
            throw ParseError("model best_iteration out of range");
        }
        return e;
    } catch (const json::exception& ex) {
        throw ParseError(std::string("model decode failed: ") + ex.what());
    }
}

void save_model(const TreeEnsemble& e, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << serialize(e);
    if (!out) throw IoError("short write to " + path);
}

TreeEnsemble load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

}  // namespace airq::gbdt
