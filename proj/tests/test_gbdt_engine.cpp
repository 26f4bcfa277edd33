#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "airq/errors.hpp"
#include "airq/gbdt.hpp"
#include "airq/rng.hpp"

using namespace airq;
using namespace airq::gbdt;

namespace {

// Brute-force exact-greedy split search over raw feature values, independent
// of the histogram path. Thresholds are the distinct values of each feature;
// a row goes left when x <= threshold.
struct OracleSplit {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

OracleSplit exact_greedy_oracle(const std::vector<std::vector<double>>& columns,
                                const std::vector<double>& gradients, double lambda,
                                int min_data) {
    const std::size_t n = gradients.size();
    double gp = 0.0;
    for (double g : gradients) gp += g;
    const double hp = static_cast<double>(n);
    const double parent_score = gp * gp / (hp + lambda);

    OracleSplit best;
    for (std::size_t f = 0; f < columns.size(); ++f) {
        std::vector<double> distinct(columns[f].begin(), columns[f].end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (std::size_t t = 0; t + 1 < distinct.size(); ++t) {
            const double threshold = distinct[t];
            double gl = 0.0;
            std::size_t cl = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (columns[f][i] <= threshold) {
                    gl += gradients[i];
                    cl += 1;
                }
            }
            const std::size_t cr = n - cl;
            if (cl < static_cast<std::size_t>(min_data) || cr < static_cast<std::size_t>(min_data)) {
                continue;
            }
            const double gr = gp - gl;
            const double hl = static_cast<double>(cl);
            const double hr = static_cast<double>(cr);
            const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_score;
            if (gain > best.gain) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = threshold;
                best.gain = gain;
            }
        }
    }
    if (!(best.gain > kMinSplitGain)) best.found = false;
    return best;
}

BinnedDataset bin_identity(const std::vector<std::vector<double>>& columns,
                           const std::vector<double>& targets) {
    return bin_features(columns, targets, TransformKind::Identity, 63);
}

NodeHistogram root_histogram(const BinnedDataset& data, const std::vector<double>& gradients) {
    std::vector<std::uint32_t> rows(data.n_rows);
    std::vector<double> weights(data.n_rows, 1.0);
    for (std::size_t i = 0; i < data.n_rows; ++i) rows[i] = static_cast<std::uint32_t>(i);
    NodeHistogram h;
    h.build(data, rows, weights, gradients);
    return h;
}

// Independent recursive tree walk for the prediction oracle.
double walk_tree(const Tree& tree, int node, const std::vector<double>& features) {
    const TreeNode& n = tree.nodes[static_cast<std::size_t>(node)];
    if (n.is_leaf()) return n.leaf_value;
    return features[static_cast<std::size_t>(n.feature)] <= n.threshold
               ? walk_tree(tree, n.left, features)
               : walk_tree(tree, n.right, features);
}

// Small synthetic regression set: y = smooth(x) + noise, two features.
void make_regression(std::size_t n, std::uint64_t seed, std::vector<std::vector<double>>& columns,
                     std::vector<double>& targets) {
    Rng rng(seed);
    columns.assign(2, {});
    targets.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = rng.uniform(0.0, 10.0);
        const double x1 = rng.uniform(0.0, 5.0);
        columns[0].push_back(x0);
        columns[1].push_back(x1);
        targets.push_back(5.0 + 2.0 * x0 + std::sin(x1 * 2.0) + rng.normal(0.0, 0.3));
    }
}

}  // namespace

TEST_CASE("transform: ln(1e-7) at zero, round trip, clamp") {
    CHECK(transform_target(0.0) == doctest::Approx(-16.1181).epsilon(1e-4));
    CHECK(inverse_transform(transform_target(12.5)) == doctest::Approx(12.5).epsilon(1e-9));
    CHECK(inverse_transform(-100.0) == 0.0);
    CHECK_THROWS_AS(transform_target(-0.1), ValidationError);
    for (double y : {0.0, 1e-6, 0.5, 12.5, 1234.0, 1e4}) {
        const double rt = inverse_transform(transform_target(y));
        CHECK(rt == doctest::Approx(y).epsilon(1e-9));
    }
}

TEST_CASE("loss gradients") {
    CHECK(loss_grad_hess(LossKind::MseLog, 0.0, 3.0, 3.0).grad == 0.0);
    CHECK(loss_grad_hess(LossKind::MseLog, 0.0, 2.0, 5.0).grad == 3.0);
    CHECK(loss_grad_hess(LossKind::Pinball, 0.95, 10.0, 5.0).grad == doctest::Approx(-0.95));
    CHECK(loss_grad_hess(LossKind::Pinball, 0.95, 5.0, 10.0).grad == doctest::Approx(0.05));
    // Median pinball: symmetric residual pair sums to zero gradient.
    const double g_above = loss_grad_hess(LossKind::Pinball, 0.5, 7.0, 5.0).grad;
    const double g_below = loss_grad_hess(LossKind::Pinball, 0.5, 3.0, 5.0).grad;
    CHECK(g_above + g_below == doctest::Approx(0.0));
    CHECK(loss_grad_hess(LossKind::MseLog, 0.0, 1.0, 2.0).hess == 1.0);
}

TEST_CASE("bin_features: constant and small-cardinality features") {
    const BinnedDataset one = bin_identity({{4.0, 4.0, 4.0}}, {1, 2, 3});
    CHECK(one.n_bins(0) == 1);
    for (auto b : one.bins[0]) CHECK(b == 0);

    const BinnedDataset three = bin_identity({{2.0, 1.0, 3.0, 2.0}}, {1, 2, 3, 4});
    CHECK(three.n_bins(0) == 3);
    CHECK(three.bins[0][0] == 1);  // value 2 -> middle bin
    CHECK(three.bins[0][1] == 0);
    CHECK(three.bins[0][2] == 2);
    CHECK(three.bins[0][3] == 1);
}

TEST_CASE("bin mapping is monotone") {
    Rng rng(3);
    std::vector<double> column;
    for (int i = 0; i < 5000; ++i) column.push_back(rng.normal(0.0, 10.0));
    const std::vector<double> edges = quantile_edges(column, 63);
    double prev = -1e18;
    for (double e : edges) {
        CHECK(e > prev);
        prev = e;
    }
    for (int i = 0; i < 200; ++i) {
        const double a = rng.uniform(-30.0, 30.0);
        const double b = a + rng.uniform(0.0, 5.0);
        CHECK(bin_of(edges, a) <= bin_of(edges, b));
    }
}

TEST_CASE("quantile binning: 10,000 uniform samples spread evenly over 63 bins") {
    Rng rng(17);
    std::vector<double> column;
    for (int i = 0; i < 10000; ++i) column.push_back(rng.uniform(0.0, 1.0));
    const std::vector<double> edges = quantile_edges(column, 63);
    CHECK(edges.size() == 62);  // 63 bins
    std::map<int, int> counts;
    for (double v : column) counts[bin_of(edges, v)] += 1;
    CHECK(counts.size() == 63);
    const double expected = 10000.0 / 63.0;
    for (const auto& [bin, count] : counts) {
        CHECK(count >= expected * 0.9);
        CHECK(count <= expected * 1.1);
    }
}

TEST_CASE("goss_sample degenerate and proportioned cases") {
    std::vector<double> gradients;
    Rng rng(5);
    for (int i = 0; i < 100; ++i) gradients.push_back(rng.normal(0.0, 1.0));

    const GossSample all = goss_sample(gradients, 1.0, 0.0, 1);
    CHECK(all.indices.size() == 100);
    for (double w : all.weights) CHECK(w == 1.0);

    const GossSample s = goss_sample(gradients, 0.2, 0.1, 1);
    CHECK(s.indices.size() == 30);
    std::size_t top = 0, sampled = 0;
    for (double w : s.weights) {
        if (w == 1.0) ++top;
        else {
            CHECK(w == doctest::Approx(8.0));  // (1 - 0.2) / 0.1
            ++sampled;
        }
    }
    CHECK(top == 20);
    CHECK(sampled == 10);

    // The 20 weight-1 rows are exactly the 20 largest |gradient| rows.
    std::vector<std::size_t> order(100);
    for (std::size_t i = 0; i < 100; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(gradients[a]) > std::abs(gradients[b]);
    });
    std::set<std::uint32_t> expected_top(order.begin(), order.begin() + 20);
    for (std::size_t i = 0; i < s.indices.size(); ++i) {
        if (s.weights[i] == 1.0) CHECK(expected_top.count(s.indices[i]) == 1);
    }

    const GossSample again = goss_sample(gradients, 0.2, 0.1, 1);
    CHECK(again.indices == s.indices);
    CHECK(again.weights == s.weights);

    CHECK_THROWS_AS(goss_sample(gradients, 0.0, 0.0, 1), ValidationError);

    const GossSample top_only = goss_sample(gradients, 0.3, 0.0, 1);
    CHECK(top_only.indices.size() == 30);
    for (double w : top_only.weights) CHECK(w == 1.0);
}

TEST_CASE("find_best_split: hand case with variance-reduction oracle") {
    // Targets 0,0,10,10 on bins 0,1,2,3; identity targets, gradients at base.
    const std::vector<std::vector<double>> columns = {{0.0, 1.0, 2.0, 3.0}};
    const std::vector<double> targets = {0.0, 0.0, 10.0, 10.0};
    const BinnedDataset data = bin_identity(columns, targets);
    const double base = 5.0;
    std::vector<double> gradients;
    for (double y : targets) gradients.push_back(base - y);

    const NodeHistogram hist = root_histogram(data, gradients);
    const auto split = find_best_split(hist, 0.0, 1);
    REQUIRE(split.has_value());
    CHECK(split->feature == 0);
    CHECK(split->bin == 1);  // between raw values 1 and 2

    const OracleSplit oracle = exact_greedy_oracle(columns, gradients, 0.0, 1);
    REQUIRE(oracle.found);
    CHECK(oracle.threshold == 1.0);
    CHECK(split->gain == doctest::Approx(oracle.gain).epsilon(1e-12));
}

TEST_CASE("find_best_split: min_data_in_leaf 3 on a 4-row node blocks all splits") {
    const std::vector<std::vector<double>> columns = {{0.0, 1.0, 2.0, 3.0}};
    const std::vector<double> targets = {0.0, 0.0, 10.0, 10.0};
    const BinnedDataset data = bin_identity(columns, targets);
    std::vector<double> gradients = {5, 5, -5, -5};
    const NodeHistogram hist = root_histogram(data, gradients);
    CHECK_FALSE(find_best_split(hist, 0.0, 3).has_value());
    CHECK_FALSE(exact_greedy_oracle(columns, gradients, 0.0, 3).found);
}

TEST_CASE("find_best_split: huge lambda drives gain to zero") {
    const std::vector<std::vector<double>> columns = {{0.0, 1.0, 2.0, 3.0}};
    const std::vector<double> targets = {0.0, 0.0, 10.0, 10.0};
    const BinnedDataset data = bin_identity(columns, targets);
    std::vector<double> gradients = {5, 5, -5, -5};
    const NodeHistogram hist = root_histogram(data, gradients);
    CHECK_FALSE(find_best_split(hist, 1e9, 1).has_value());
}

TEST_CASE("histogram split equals exact greedy on random small-cardinality data") {
    Rng rng(71);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 20 + rng.below(481);
        const int n_features = 5;
        const int cardinality = 2 + static_cast<int>(rng.below(62));
        std::vector<std::vector<double>> columns(n_features);
        std::vector<double> gradients;
        for (std::size_t i = 0; i < n; ++i) {
            for (int f = 0; f < n_features; ++f) {
                columns[static_cast<std::size_t>(f)].push_back(
                    std::floor(rng.uniform(0.0, cardinality)) * 0.5 - 3.0);
            }
            gradients.push_back(rng.normal(0.0, 2.0));
        }
        const int min_data = 1 + static_cast<int>(rng.below(5));
        const double lambda = rng.uniform(0.0, 2.0);

        std::vector<double> fake_targets(n, 1.0);
        const BinnedDataset data = bin_identity(columns, fake_targets);
        const NodeHistogram hist = root_histogram(data, gradients);
        const auto split = find_best_split(hist, lambda, min_data);
        const OracleSplit oracle = exact_greedy_oracle(columns, gradients, lambda, min_data);

        REQUIRE(split.has_value() == oracle.found);
        if (oracle.found) {
            CHECK(split->feature == oracle.feature);
            const double engine_threshold =
                data.bin_edges[static_cast<std::size_t>(split->feature)]
                              [static_cast<std::size_t>(split->bin)];
            CHECK(engine_threshold == oracle.threshold);
            CHECK(split->gain == doctest::Approx(oracle.gain).epsilon(1e-9));
        }
    }
}

TEST_CASE("histogram additivity: parent equals left plus right exactly") {
    // Integer-valued gradients make double sums order-independent and exact.
    Rng rng(29);
    const std::size_t n = 500;
    std::vector<std::vector<double>> columns(3);
    std::vector<double> gradients;
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& c : columns) c.push_back(static_cast<double>(rng.below(40)));
        gradients.push_back(static_cast<double>(rng.below(2000)) - 1000.0);
    }
    const BinnedDataset data = bin_identity(columns, std::vector<double>(n, 1.0));

    std::vector<std::uint32_t> left_rows, right_rows, all_rows;
    for (std::uint32_t i = 0; i < n; ++i) {
        all_rows.push_back(i);
        (data.bins[0][i] <= 20 ? left_rows : right_rows).push_back(i);
    }
    const std::vector<double> w_all(n, 1.0);
    NodeHistogram parent, left, right;
    parent.build(data, all_rows, w_all, gradients);
    left.build(data, left_rows, std::vector<double>(left_rows.size(), 1.0), gradients);
    right.build(data, right_rows, std::vector<double>(right_rows.size(), 1.0), gradients);

    for (std::size_t f = 0; f < parent.per_feature.size(); ++f) {
        for (std::size_t b = 0; b < parent.per_feature[f].size(); ++b) {
            CHECK(parent.per_feature[f][b].grad ==
                  left.per_feature[f][b].grad + right.per_feature[f][b].grad);
            CHECK(parent.per_feature[f][b].hess ==
                  left.per_feature[f][b].hess + right.per_feature[f][b].hess);
            CHECK(parent.per_feature[f][b].count ==
                  left.per_feature[f][b].count + right.per_feature[f][b].count);
        }
    }
    const NodeHistogram derived = NodeHistogram::subtract(parent, left);
    for (std::size_t f = 0; f < parent.per_feature.size(); ++f) {
        for (std::size_t b = 0; b < parent.per_feature[f].size(); ++b) {
            CHECK(derived.per_feature[f][b].grad == right.per_feature[f][b].grad);
            CHECK(derived.per_feature[f][b].count == right.per_feature[f][b].count);
        }
    }
}

TEST_CASE("train: constant target adds no trees beyond the base score") {
    std::vector<std::vector<double>> columns = {{1, 2, 3, 4, 5, 6, 7, 8}};
    std::vector<double> targets(8, 4.2);
    const BinnedDataset data = bin_features(columns, targets, TransformKind::LogPlusEps, 63);
    TrainParams p;
    p.num_leaves = 4;
    p.min_data_in_leaf = 1;
    p.goss_top_rate = 1.0;
    p.goss_other_rate = 0.0;
    const TreeEnsemble e = train(p, data, data);
    CHECK(e.trees.empty());
    CHECK(e.best_iteration == 0);
    const std::vector<double> probe = {3.0};
    CHECK(e.predict(probe) == doctest::Approx(4.2).epsilon(1e-9));
}

TEST_CASE("train: boosting beats the mean predictor on 50 rows") {
    std::vector<std::vector<double>> columns;
    std::vector<double> targets;
    make_regression(50, 7, columns, targets);
    const BinnedDataset data = bin_features(columns, targets, TransformKind::LogPlusEps, 63);
    TrainParams p;
    p.num_leaves = 50;
    p.min_data_in_leaf = 1;
    p.max_trees = 20;
    p.goss_top_rate = 1.0;
    p.goss_other_rate = 0.0;
    TrainLog log;
    const TreeEnsemble e = train(p, data, data, &log);
    REQUIRE_FALSE(log.train_loss.empty());

    double mean = 0.0;
    for (double t : data.targets) mean += t;
    mean /= static_cast<double>(data.targets.size());
    double mean_mse = 0.0;
    for (double t : data.targets) mean_mse += (t - mean) * (t - mean);
    mean_mse /= static_cast<double>(data.targets.size());
    CHECK(log.train_loss.back() <= mean_mse);
}

TEST_CASE("train: per-round training loss is non-increasing (MSE and pinball)") {
    std::vector<std::vector<double>> columns;
    std::vector<double> targets;
    make_regression(300, 11, columns, targets);
    const BinnedDataset data = bin_features(columns, targets, TransformKind::LogPlusEps, 63);

    for (const LossKind loss : {LossKind::MseLog, LossKind::Pinball}) {
        for (const double q : loss == LossKind::Pinball ? std::vector<double>{0.05, 0.5, 0.95}
                                                        : std::vector<double>{0.0}) {
            TrainParams p;
            p.num_leaves = 15;
            p.min_data_in_leaf = 5;
            p.max_trees = 60;
            p.loss = loss;
            p.quantile = q;
            p.lambda_l2 = 0.5;
            TrainLog log;
            train(p, data, data, &log);
            double prev = std::numeric_limits<double>::infinity();
            for (double l : log.train_loss) {
                CHECK(l <= prev + 1e-12);
                prev = l;
            }
        }
    }
}

TEST_CASE("train: early stopping keeps at most best_iteration + rounds trees") {
    std::vector<std::vector<double>> columns;
    std::vector<double> targets;
    make_regression(200, 13, columns, targets);
    const BinnedDataset train_set = bin_features(columns, targets, TransformKind::LogPlusEps, 63);

    // Pure-noise validation set forces early stopping quickly.
    std::vector<std::vector<double>> vcolumns;
    std::vector<double> vtargets;
    make_regression(100, 14, vcolumns, vtargets);
    Rng rng(15);
    for (auto& t : vtargets) t = rng.uniform(0.0, 50.0);
    const BinnedDataset valid_set =
        bin_with_edges(vcolumns, vtargets, train_set.bin_edges, TransformKind::LogPlusEps);

    TrainParams p;
    p.num_leaves = 10;
    p.min_data_in_leaf = 5;
    p.max_trees = 500;
    p.early_stopping_rounds = 10;
    const TreeEnsemble e = train(p, train_set, valid_set);
    CHECK(static_cast<int>(e.trees.size()) <= e.best_iteration + p.early_stopping_rounds);
}

TEST_CASE("train: deterministic rerun serializes identically") {
    std::vector<std::vector<double>> columns;
    std::vector<double> targets;
    make_regression(150, 21, columns, targets);
    const BinnedDataset data = bin_features(columns, targets, TransformKind::LogPlusEps, 63);
    TrainParams p;
    p.num_leaves = 12;
    p.min_data_in_leaf = 4;
    p.max_trees = 30;
    p.seed = 99;
    const std::string a = serialize(train(p, data, data));
    const std::string b = serialize(train(p, data, data));
    CHECK(a == b);
}

TEST_CASE("predict: raw-value routing equals the recursive oracle, result >= 0") {
    std::vector<std::vector<double>> columns;
    std::vector<double> targets;
    make_regression(400, 31, columns, targets);
    const BinnedDataset data = bin_features(columns, targets, TransformKind::LogPlusEps, 63);
    TrainParams p;
    p.num_leaves = 20;
    p.min_data_in_leaf = 3;
    p.max_trees = 40;
    const TreeEnsemble e = train(p, data, data);
    REQUIRE_FALSE(e.trees.empty());

    Rng rng(32);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> probe = {rng.uniform(-2.0, 12.0), rng.uniform(-1.0, 6.0)};
        double score = e.base_score;
        for (int t = 0; t < e.best_iteration; ++t) {
            score += e.params.learning_rate * walk_tree(e.trees[static_cast<std::size_t>(t)], 0, probe);
        }
        const double expected = inverse_transform(score);
        const double got = e.predict(probe);
        CHECK(got == expected);
        CHECK(got >= 0.0);
    }
    CHECK_THROWS_AS(e.predict({std::nan(""), 1.0}), ValidationError);
    CHECK_THROWS_AS(e.predict({1.0}), ValidationError);
}

TEST_CASE("serialize round trip preserves predictions bit-exactly") {
    std::vector<std::vector<double>> columns;
    std::vector<double> targets;
    make_regression(250, 41, columns, targets);
    const BinnedDataset data = bin_features(columns, targets, TransformKind::LogPlusEps, 63);
    TrainParams p;
    p.num_leaves = 16;
    p.min_data_in_leaf = 2;
    p.max_trees = 25;
    const TreeEnsemble e = train(p, data, data);
    const std::string bytes = serialize(e);
    const TreeEnsemble back = deserialize(bytes);
    CHECK(serialize(back) == bytes);

    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> probe = {rng.uniform(-5.0, 15.0), rng.uniform(-5.0, 10.0)};
        CHECK(e.predict(probe) == back.predict(probe));
    }

    CHECK_THROWS_AS(deserialize(bytes.substr(0, bytes.size() / 2)), ParseError);
    CHECK_THROWS_AS(deserialize("{}"), ParseError);

    // Version bump is a decode error, not a silent acceptance.
    std::string bumped = bytes;
    const auto pos = bumped.find("\"version\":1");
    REQUIRE(pos != std::string::npos);
    bumped.replace(pos, 11, "\"version\":2");
    CHECK_THROWS_AS(deserialize(bumped), ParseError);
}

TEST_CASE("pinball quantile ordering holds on nearly all training points") {
    std::vector<std::vector<double>> columns;
    std::vector<double> targets;
    Rng rng(55);
    columns.assign(1, {});
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform(0.0, 10.0);
        columns[0].push_back(x);
        targets.push_back(10.0 + x + rng.uniform(-2.0, 2.0));
    }
    const BinnedDataset data = bin_features(columns, targets, TransformKind::LogPlusEps, 63);

    TrainParams p;
    p.num_leaves = 31;
    p.min_data_in_leaf = 20;
    p.max_trees = 150;
    p.loss = LossKind::Pinball;

    auto train_q = [&](double q) {
        TrainParams pq = p;
        pq.quantile = q;
        return train(pq, data, data);
    };
    const TreeEnsemble m05 = train_q(0.05);
    const TreeEnsemble m50 = train_q(0.5);
    const TreeEnsemble m95 = train_q(0.95);

    int ordered = 0;
    const int n_probe = 1000;
    for (int i = 0; i < n_probe; ++i) {
        const std::vector<double> probe = {rng.uniform(0.5, 9.5)};
        const double a = m05.predict(probe);
        const double b = m50.predict(probe);
        const double c = m95.predict(probe);
        if (a <= b && b <= c) ++ordered;
    }
    CHECK(ordered >= n_probe * 99 / 100);
}

TEST_CASE("TrainParams validation") {
    TrainParams p;
    p.num_leaves = 1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = TrainParams{};
    p.max_bin = 64;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = TrainParams{};
    p.goss_top_rate = 0.8;
    p.goss_other_rate = 0.4;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = TrainParams{};
    CHECK_NOTHROW(p.validate());
}
