#include <algorithm>
#include <cmath>

#include "airq/errors.hpp"
#include "airq/gbdt.hpp"

namespace airq::gbdt {

double transform_target(double y) {
    if (!(y >= 0.0) || !std::isfinite(y)) {
        throw ValidationError("transform_target: concentration must be finite and >= 0");
    }
    return std::log(y + kLogEps);
}

double inverse_transform(double z) { return std::max(0.0, std::exp(z) - kLogEps); }

double apply_transform(TransformKind k, double y) {
    return k == TransformKind::LogPlusEps ? transform_target(y) : y;
}

double invert_transform(TransformKind k, double z) {
    return k == TransformKind::LogPlusEps ? inverse_transform(z) : std::max(0.0, z);
}

GradHess loss_grad_hess(LossKind loss, double quantile, double y, double yhat) {
    if (loss == LossKind::MseLog) return {yhat - y, 1.0};
    return {y > yhat ? -quantile : 1.0 - quantile, 1.0};
}

double pointwise_loss(LossKind loss, double quantile, double y, double yhat) {
    if (loss == LossKind::MseLog) {
        const double d = y - yhat;
        return d * d;
    }
    const double r = y - yhat;
    return r >= 0.0 ? quantile * r : (quantile - 1.0) * r;
}

void TrainParams::validate() const {
    if (num_leaves < 2 || num_leaves > 4095) {
        throw ValidationError("num_leaves must be in [2, 4095]");
    }
    if (min_data_in_leaf < 1) throw ValidationError("min_data_in_leaf must be >= 1");
    if (!(lambda_l2 >= 0.0)) throw ValidationError("lambda_l2 must be >= 0");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
        throw ValidationError("learning_rate must be in (0, 1]");
    }
    if (max_trees < 1) throw ValidationError("max_trees must be >= 1");
    if (early_stopping_rounds < 1) throw ValidationError("early_stopping_rounds must be >= 1");
    if (!(goss_top_rate >= 0.0 && goss_top_rate <= 1.0) ||
        !(goss_other_rate >= 0.0 && goss_other_rate <= 1.0) ||
        goss_top_rate + goss_other_rate > 1.0 + 1e-12) {
        throw ValidationError("GOSS rates must satisfy a, b in [0,1], a + b <= 1");
    }
    if (goss_top_rate == 0.0 && goss_other_rate == 0.0) {
        throw ValidationError("GOSS rates a = b = 0 select no data");
    }
    if (max_bin < 2 || max_bin > 63) throw ValidationError("max_bin must be in [2, 63]");
    if (loss == LossKind::Pinball && !(quantile > 0.0 && quantile < 1.0)) {
        throw ValidationError("quantile must be in (0, 1)");
    }
}

int bin_of(const std::vector<double>& edges, double x) {
    const auto it = std::lower_bound(edges.begin(), edges.end(), x);
    return static_cast<int>(it - edges.begin());
}

std::vector<double> quantile_edges(std::vector<double> column_values, int max_bins) {
    if (max_bins < 2 || max_bins > 63) throw ValidationError("max_bins must be in [2, 63]");
    if (column_values.empty()) throw ValidationError("quantile_edges: empty column");
    std::sort(column_values.begin(), column_values.end());

    std::vector<double> distinct = column_values;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() <= static_cast<std::size_t>(max_bins)) {
        // One bin per distinct value; edges at every value but the last.
        distinct.pop_back();
        return distinct;
    }

    // Edges at sample quantiles (duplicates included). Deduplication keeps
    // the edge list strictly increasing when quantile positions collide,
    // merging bins so at most max_bins populated bins remain.
    const std::size_t n = column_values.size();
    std::vector<double> edges;
    for (int b = 1; b < max_bins; ++b) {
        std::size_t idx = static_cast<std::size_t>(
            static_cast<double>(b) * static_cast<double>(n) / static_cast<double>(max_bins));
        idx = std::min(idx == 0 ? 0 : idx - 1, n - 1);
        edges.push_back(column_values[idx]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    // An edge equal to the global maximum would leave the last bin empty.
    while (!edges.empty() && edges.back() >= column_values.back()) edges.pop_back();
    return edges;
}

namespace {

BinnedDataset bin_columns(const std::vector<std::vector<double>>& columns,
                          const std::vector<double>& raw_targets,
                          std::vector<std::vector<double>> edges, TransformKind transform) {
    BinnedDataset d;
    d.n_features = static_cast<int>(columns.size());
    d.n_rows = raw_targets.size();
    d.transform = transform;
    d.bin_edges = std::move(edges);
    d.bins.resize(columns.size());
    for (std::size_t f = 0; f < columns.size(); ++f) {
        if (columns[f].size() != d.n_rows) {
            throw ValidationError("bin_features: column length mismatch");
        }
        if (d.bin_edges[f].size() > 62) {
            throw ValidationError("bin_features: more than 63 bins");
        }
        d.bins[f].resize(d.n_rows);
        for (std::size_t r = 0; r < d.n_rows; ++r) {
            if (!std::isfinite(columns[f][r])) {
                throw ValidationError("bin_features: non-finite feature value");
            }
            d.bins[f][r] = static_cast<std::uint8_t>(bin_of(d.bin_edges[f], columns[f][r]));
        }
    }
    d.targets.resize(d.n_rows);
    for (std::size_t r = 0; r < d.n_rows; ++r) {
        d.targets[r] = apply_transform(transform, raw_targets[r]);
    }
    return d;
}

}  // namespace

BinnedDataset bin_features(const std::vector<std::vector<double>>& columns,
                           const std::vector<double>& raw_targets, TransformKind transform,
                           int max_bins) {
    if (raw_targets.empty()) throw ValidationError("bin_features: empty dataset");
    if (columns.empty()) throw ValidationError("bin_features: no feature columns");
    std::vector<std::vector<double>> edges(columns.size());
    for (std::size_t f = 0; f < columns.size(); ++f) {
        edges[f] = quantile_edges(columns[f], max_bins);
    }
    return bin_columns(columns, raw_targets, std::move(edges), transform);
}

BinnedDataset bin_with_edges(const std::vector<std::vector<double>>& columns,
                             const std::vector<double>& raw_targets,
                             const std::vector<std::vector<double>>& edges,
                             TransformKind transform) {
    if (columns.size() != edges.size()) {
        throw ValidationError("bin_with_edges: feature count mismatch");
    }
    return bin_columns(columns, raw_targets, edges, transform);
}

}  // namespace airq::gbdt
