#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "airq/errors.hpp"
#include "airq/gbdt.hpp"


namespace airq::gbdt {

GossSample goss_sample(const std::vector<double>& gradients, double top_rate, double other_rate,
                       std::uint64_t seed) {
    const std::size_t n = gradients.size();
    if (n == 0) throw ValidationError("goss_sample: empty gradient vector");
    if (top_rate < 0.0 || top_rate > 1.0 || other_rate < 0.0 || other_rate > 1.0 ||
        top_rate + other_rate > 1.0 + 1e-12) {
        throw ValidationError("goss_sample: rates must satisfy a, b in [0,1], a + b <= 1");
    }
    if (top_rate == 0.0 && other_rate == 0.0) {
        throw ValidationError("goss_sample: a = b = 0 selects no data");
    }

    const std::size_t top_n =
        std::min(n, static_cast<std::size_t>(std::ceil(top_rate * static_cast<double>(n))));

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    // |gradient| descending, index ascending on ties, so the top set is
    // deterministic.
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::abs(gradients[a]) > std::abs(gradients[b]);
    });

    GossSample out;
    for (std::size_t i = 0; i < top_n; ++i) {
        out.indices.push_back(order[i]);
        out.weights.push_back(1.0);
    }

    if (other_rate > 0.0 && top_n < n) {
        std::vector<std::uint32_t> rest(order.begin() + static_cast<std::ptrdiff_t>(top_n),
                                        order.end());
        std::sort(rest.begin(), rest.end());
        std::size_t sample_n =
            static_cast<std::size_t>(std::ceil(other_rate * static_cast<double>(n)));
        sample_n = std::min(sample_n, rest.size());
        Rng rng(seed);
        rng.shuffle(rest);
        const double w = (1.0 - top_rate) / other_rate;
        for (std::size_t i = 0; i < sample_n; ++i) {
            out.indices.push_back(rest[i]);
            out.weights.push_back(w);
        }
    }

    // Ascending row order for cache-friendly histogram scans.
    std::vector<std::size_t> perm(out.indices.size());
    std::iota(perm.begin(), perm.end(), 0u);
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return out.indices[a] < out.indices[b]; });
    GossSample sorted;
    sorted.indices.reserve(perm.size());
    sorted.weights.reserve(perm.size());
    for (std::size_t p : perm) {
        sorted.indices.push_back(out.indices[p]);
        sorted.weights.push_back(out.weights[p]);
    }
    return sorted;
}

void NodeHistogram::build(const BinnedDataset& data, const std::vector<std::uint32_t>& rows,
                          const std::vector<double>& weights,
                          const std::vector<double>& gradients) {
    per_feature.assign(static_cast<std::size_t>(data.n_features), {});
    for (int f = 0; f < data.n_features; ++f) {
        auto& hist = per_feature[static_cast<std::size_t>(f)];
        hist.assign(static_cast<std::size_t>(data.n_bins(f)), HistBin{});
        const auto& column = data.bins[static_cast<std::size_t>(f)];
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::uint32_t r = rows[i];
            HistBin& bin = hist[column[r]];
            const double w = weights[i];
            bin.grad += w * gradients[r];
            bin.hess += w;  // constant unit hessian for both losses
            bin.count += 1;
        }
    }
}

NodeHistogram NodeHistogram::subtract(const NodeHistogram& parent, const NodeHistogram& child) {
    NodeHistogram out;
    out.per_feature.resize(parent.per_feature.size());
    for (std::size_t f = 0; f < parent.per_feature.size(); ++f) {
        const auto& p = parent.per_feature[f];
        const auto& c = child.per_feature[f];
        auto& o = out.per_feature[f];
        o.resize(p.size());
        for (std::size_t b = 0; b < p.size(); ++b) {
            o[b].grad = p[b].grad - c[b].grad;
            o[b].hess = p[b].hess - c[b].hess;
            o[b].count = p[b].count - c[b].count;
        }
    }
    return out;
}

double NodeHistogram::total_grad() const {
    double g = 0.0;
    if (!per_feature.empty()) {
        for (const HistBin& b : per_feature[0]) g += b.grad;
    }
    return g;
}

double NodeHistogram::total_hess() const {
    double h = 0.0;
    if (!per_feature.empty()) {
        for (const HistBin& b : per_feature[0]) h += b.hess;
    }
    return h;
}

std::uint64_t NodeHistogram::total_count() const {
    std::uint64_t c = 0;
    if (!per_feature.empty()) {
        for (const HistBin& b : per_feature[0]) c += b.count;
    }
    return c;
}

std::optional<SplitCandidate> find_best_split(const NodeHistogram& hist, double lambda_l2,
                                              int min_data_in_leaf) {
    const double gp = hist.total_grad();
    const double hp = hist.total_hess();
    const std::uint64_t cp = hist.total_count();
    const double parent_score = gp * gp / (hp + lambda_l2);

    SplitCandidate best;
    for (std::size_t f = 0; f < hist.per_feature.size(); ++f) {
        const auto& bins = hist.per_feature[f];
        double gl = 0.0, hl = 0.0;
        std::uint64_t cl = 0;
        // The last bin never terminates a left side; that split is the parent.
        for (std::size_t b = 0; b + 1 < bins.size(); ++b) {
            gl += bins[b].grad;
            hl += bins[b].hess;
            cl += bins[b].count;
            const std::uint64_t cr = cp - cl;
            if (cl < static_cast<std::uint64_t>(min_data_in_leaf) ||
                cr < static_cast<std::uint64_t>(min_data_in_leaf)) {
                continue;
            }
            const double gr = gp - gl;
            const double hr = hp - hl;
            const double gain =
                gl * gl / (hl + lambda_l2) + gr * gr / (hr + lambda_l2) - parent_score;
            if (gain > best.gain) {
                best.feature = static_cast<int>(f);
                best.bin = static_cast<int>(b);
                best.gain = gain;
            }
        }
    }
    if (best.feature < 0 || !(best.gain > kMinSplitGain)) return std::nullopt;
    return best;
}

namespace {

// Leaf under construction: GOSS-sampled rows drive split search, the full row
// set drives the final leaf value.
struct LeafState {
    int node_id = -1;
    std::vector<std::uint32_t> sampled_rows;
    std::vector<double> sampled_weights;
    std::vector<std::uint32_t> full_rows;
    NodeHistogram hist;
    std::optional<SplitCandidate> split;
};

double dataset_loss(const std::vector<double>& targets, const std::vector<double>& preds,
                    LossKind loss, double quantile) {
    double acc = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        acc += pointwise_loss(loss, quantile, targets[i], preds[i]);
    }
    return acc / static_cast<double>(targets.size());
}

// Exact argmin of the leaf objective over the full row set, shrunk by
// n/(n+lambda): the squared-error Newton step for MseLog, the residual
// q-quantile order statistic r_(ceil(qn)) for Pinball. Scaling an exact
// argmin by a factor in [0, 1] cannot increase a convex leaf objective,
// which keeps per-round training loss non-increasing.
double fit_leaf_value(const std::vector<std::uint32_t>& rows, const std::vector<double>& targets,
                      const std::vector<double>& preds, const TrainParams& params) {
    const double n = static_cast<double>(rows.size());
    if (rows.empty()) return 0.0;
    if (params.loss == LossKind::MseLog) {
        double g = 0.0;
        for (std::uint32_t r : rows) g += preds[r] - targets[r];
        return -g / (n + params.lambda_l2);
    }
    std::vector<double> residuals;
    residuals.reserve(rows.size());
    for (std::uint32_t r : rows) residuals.push_back(targets[r] - preds[r]);
    std::sort(residuals.begin(), residuals.end());
    std::size_t k = static_cast<std::size_t>(std::ceil(params.quantile * n));
    k = std::min(std::max<std::size_t>(k, 1), residuals.size());
    return residuals[k - 1] * (n / (n + params.lambda_l2));
}

}  // namespace

int Tree::leaf_count() const {
    int c = 0;
    for (const TreeNode& n : nodes) c += n.is_leaf() ? 1 : 0;
    return c;
}

double Tree::predict_raw(const double* features) const {
    int id = 0;
    while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
        const TreeNode& n = nodes[static_cast<std::size_t>(id)];
        const double v = features[n.feature];
        if (std::isnan(v)) {
            id = n.default_left ? n.left : n.right;
        } else {
            id = v <= n.threshold ? n.left : n.right;
        }
    }
    return nodes[static_cast<std::size_t>(id)].leaf_value;
}

double Tree::predict_binned(const BinnedDataset& data, std::size_t row) const {
    int id = 0;
    while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
        const TreeNode& n = nodes[static_cast<std::size_t>(id)];
        const int bin = data.bins[static_cast<std::size_t>(n.feature)][row];
        id = bin <= n.split_bin ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(id)].leaf_value;
}

TreeEnsemble train(const TrainParams& params, const BinnedDataset& train_set,
                   const BinnedDataset& valid_set, TrainLog* log) {
    params.validate();
    if (train_set.n_rows == 0) throw ValidationError("train: empty training set");
    if (valid_set.n_rows == 0) throw ValidationError("train: empty validation set");
    if (!train_set.shares_edges_with(valid_set)) {
        throw ValidationError("train: train and validation sets must share bin boundaries");
    }

    const std::size_t n = train_set.n_rows;
    TreeEnsemble ens;
    ens.loss = params.loss;
    ens.quantile = params.quantile;
    ens.transform = train_set.transform;
    ens.params = params;
    ens.n_features = train_set.n_features;
    ens.bin_edges = train_set.bin_edges;
    ens.base_score =
        std::accumulate(train_set.targets.begin(), train_set.targets.end(), 0.0) /
        static_cast<double>(n);

    std::vector<double> train_pred(n, ens.base_score);
    std::vector<double> valid_pred(valid_set.n_rows, ens.base_score);
    std::vector<double> gradients(n, 0.0);

    double best_valid = dataset_loss(valid_set.targets, valid_pred, params.loss, params.quantile);
    ens.best_iteration = 0;
    int rounds_without_improvement = 0;

    for (int round = 0; round < params.max_trees; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            gradients[i] =
                loss_grad_hess(params.loss, params.quantile, train_set.targets[i], train_pred[i])
                    .grad;
        }

        const GossSample sample = goss_sample(
            gradients, params.goss_top_rate, params.goss_other_rate,
            derive_seed(params.seed, "goss_round:" + std::to_string(round)));

        Tree tree;
        tree.nodes.push_back(TreeNode{});
        std::vector<std::unique_ptr<LeafState>> leaves;
        {
            auto root = std::make_unique<LeafState>();
            root->node_id = 0;
            root->sampled_rows = sample.indices;
            root->sampled_weights = sample.weights;
            root->full_rows.resize(n);
            std::iota(root->full_rows.begin(), root->full_rows.end(), 0u);
            root->hist.build(train_set, root->sampled_rows, root->sampled_weights, gradients);
            root->split = find_best_split(root->hist, params.lambda_l2, params.min_data_in_leaf);
            leaves.push_back(std::move(root));
        }

        while (static_cast<int>(leaves.size()) < params.num_leaves) {
            // Best positive-gain leaf; ties resolve to the earlier node id.
            int pick = -1;
            for (std::size_t i = 0; i < leaves.size(); ++i) {
                if (!leaves[i]->split) continue;
                if (pick < 0 || leaves[i]->split->gain > leaves[static_cast<std::size_t>(pick)]->split->gain) {
                    pick = static_cast<int>(i);
                }
            }
            if (pick < 0) break;

            LeafState& parent = *leaves[static_cast<std::size_t>(pick)];
            const SplitCandidate split = *parent.split;
            const auto& column = train_set.bins[static_cast<std::size_t>(split.feature)];

            auto left = std::make_unique<LeafState>();
            auto right = std::make_unique<LeafState>();
            for (std::size_t i = 0; i < parent.sampled_rows.size(); ++i) {
                const std::uint32_t r = parent.sampled_rows[i];
                LeafState& side = column[r] <= split.bin ? *left : *right;
                side.sampled_rows.push_back(r);
                side.sampled_weights.push_back(parent.sampled_weights[i]);
            }
            for (std::uint32_t r : parent.full_rows) {
                (column[r] <= split.bin ? *left : *right).full_rows.push_back(r);
            }

            // Build the smaller child's histogram, derive the sibling by
            // subtraction.
            LeafState& small = left->sampled_rows.size() <= right->sampled_rows.size() ? *left : *right;
            LeafState& big = &small == left.get() ? *right : *left;
            small.hist.build(train_set, small.sampled_rows, small.sampled_weights, gradients);
            big.hist = NodeHistogram::subtract(parent.hist, small.hist);
            left->split = find_best_split(left->hist, params.lambda_l2, params.min_data_in_leaf);
            right->split = find_best_split(right->hist, params.lambda_l2, params.min_data_in_leaf);
            // Terminal leaves only contribute full_rows to the value refit;
            // their histograms and sample lists are dead weight.
            for (LeafState* child : {left.get(), right.get()}) {
                if (!child->split) {
                    child->hist = NodeHistogram{};
                    child->sampled_rows.clear();
                    child->sampled_rows.shrink_to_fit();
                    child->sampled_weights.clear();
                    child->sampled_weights.shrink_to_fit();
                }
            }

            // Rewrite the expanded leaf as an internal node.
            const int left_id = static_cast<int>(tree.nodes.size());
            const int right_id = left_id + 1;
            left->node_id = left_id;
            right->node_id = right_id;
            {
                TreeNode& node = tree.nodes[static_cast<std::size_t>(parent.node_id)];
                node.feature = split.feature;
                node.split_bin = split.bin;
                node.threshold = train_set.bin_edges[static_cast<std::size_t>(split.feature)]
                                                    [static_cast<std::size_t>(split.bin)];
                node.left = left_id;
                node.right = right_id;
            }
            tree.nodes.push_back(TreeNode{});  // invalidates node references
            tree.nodes.push_back(TreeNode{});

            leaves[static_cast<std::size_t>(pick)] = std::move(left);
            leaves.push_back(std::move(right));
        }

        if (tree.nodes.size() == 1) break;  // no positive-gain split anywhere

        for (const auto& leaf : leaves) {
            const double value = fit_leaf_value(leaf->full_rows, train_set.targets, train_pred, params);
            tree.nodes[static_cast<std::size_t>(leaf->node_id)].leaf_value = value;
            const double step = params.learning_rate * value;
            for (std::uint32_t r : leaf->full_rows) train_pred[r] += step;
        }
        ens.trees.push_back(std::move(tree));

        for (std::size_t i = 0; i < valid_set.n_rows; ++i) {
            valid_pred[i] += params.learning_rate * ens.trees.back().predict_binned(valid_set, i);
        }

        const double train_loss =
            dataset_loss(train_set.targets, train_pred, params.loss, params.quantile);
        const double valid_loss =
            dataset_loss(valid_set.targets, valid_pred, params.loss, params.quantile);
        if (log) {
            log->train_loss.push_back(train_loss);
            log->valid_loss.push_back(valid_loss);
        }

        if (valid_loss < best_valid) {
            best_valid = valid_loss;
            ens.best_iteration = static_cast<int>(ens.trees.size());
            rounds_without_improvement = 0;
        } else {
            rounds_without_improvement += 1;
            if (rounds_without_improvement >= params.early_stopping_rounds) break;
        }
    }
    return ens;
}

}  // namespace airq::gbdt
