#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "airq/rng.hpp"

namespace airq::gbdt {

enum class LossKind { MseLog, Pinball };
enum class TransformKind { LogPlusEps, Identity };

// Offset added before the log transform so zero concentrations stay finite.
constexpr double kLogEps = 1e-7;

// z = ln(y + 1e-7). Throws ValidationError for y < 0.
double transform_target(double y);
// y = max(0, exp(z) - 1e-7); never negative.
double inverse_transform(double z);

double apply_transform(TransformKind k, double y);
double invert_transform(TransformKind k, double z);

// Gradient/constant-hessian pair for one observation in transformed space.
// MseLog: g = yhat - y, h = 1. Pinball(q): g = -q if y > yhat else 1 - q, h = 1.
struct GradHess {
    double grad = 0.0;
    double hess = 1.0;
};
GradHess loss_grad_hess(LossKind loss, double quantile, double y, double yhat);

double pointwise_loss(LossKind loss, double quantile, double y, double yhat);

struct TrainParams {
    int num_leaves = 31;           // [2, 4095]
    int min_data_in_leaf = 20;     // >= 1
    double lambda_l2 = 0.0;        // >= 0
    double learning_rate = 0.1;    // (0, 1]
    int max_trees = 500;           // >= 1
    int early_stopping_rounds = 10;
    double goss_top_rate = 0.2;    // a in [0, 1]
    double goss_other_rate = 0.1;  // b in [0, 1], a + b <= 1
    int max_bin = 63;              // <= 63
    LossKind loss = LossKind::MseLog;
    double quantile = 0.5;  // only for Pinball
    std::uint64_t seed = 0;

    void validate() const;  // throws ValidationError
};

// Column-store training representation: per-feature bin ids (<= 63 bins) plus
// the target vector in transformed space.
struct BinnedDataset {
    std::size_t n_rows = 0;
    int n_features = 0;
    TransformKind transform = TransformKind::LogPlusEps;
    // Internal inclusive upper edges between bins; feature f has
    // edges[f].size() + 1 bins. Strictly increasing.
    std::vector<std::vector<double>> bin_edges;
    std::vector<std::vector<std::uint8_t>> bins;  // [feature][row]
    std::vector<double> targets;                  // transformed space

    int n_bins(int feature) const { return static_cast<int>(bin_edges[feature].size()) + 1; }
    bool shares_edges_with(const BinnedDataset& other) const { return bin_edges == other.bin_edges; }
};

// Bin id of a raw value against one feature's edges: the first bin whose
// inclusive upper edge is >= x, the last bin when x exceeds every edge.
int bin_of(const std::vector<double>& edges, double x);

// Equal-frequency binning. Features with <= max_bins distinct values get one
// bin per value; otherwise edges sit at sample quantiles, deduplicated, so at
// most max_bins populated bins remain. The mapping is monotone in x.
std::vector<double> quantile_edges(std::vector<double> column_values, int max_bins);

// Feature-major columns -> binned dataset. Targets enter in original units
// and are stored transformed.
BinnedDataset bin_features(const std::vector<std::vector<double>>& columns,
                           const std::vector<double>& raw_targets, TransformKind transform,
                           int max_bins = 63);

// Bins new rows with edges frozen from a training set (validation/test path).
BinnedDataset bin_with_edges(const std::vector<std::vector<double>>& columns,
                             const std::vector<double>& raw_targets,
                             const std::vector<std::vector<double>>& edges,
                             TransformKind transform);

// --- GOSS ------------------------------------------------------------------

// Keep the ceil(a*n) rows with the largest |gradient| at weight 1 and a
// uniform ceil(b*n) sample of the remainder at weight (1-a)/b. Indices are
// returned ascending with weights aligned.
struct GossSample {
    std::vector<std::uint32_t> indices;
    std::vector<double> weights;
};
GossSample goss_sample(const std::vector<double>& gradients, double top_rate, double other_rate,
                       std::uint64_t seed);

// --- Histograms and splits ---------------------------------------------------

struct HistBin {
    double grad = 0.0;
    double hess = 0.0;
    std::uint32_t count = 0;
};

struct NodeHistogram {
    std::vector<std::vector<HistBin>> per_feature;

    void build(const BinnedDataset& data, const std::vector<std::uint32_t>& rows,
               const std::vector<double>& weights, const std::vector<double>& gradients);
    // parent - child, bin-wise; exact arithmetic on each component.
    static NodeHistogram subtract(const NodeHistogram& parent, const NodeHistogram& child);

    double total_grad() const;
    double total_hess() const;
    std::uint64_t total_count() const;
};

struct SplitCandidate {
    int feature = -1;
    int bin = -1;  // left child takes bin ids <= bin
    double gain = 0.0;
};

// Tolerance below which a split gain counts as zero, so heavy regularization
// (gain ~ G^2/lambda) terminates growth instead of producing no-op splits.
constexpr double kMinSplitGain = 1e-6;

// Maximizes G_L^2/(H_L+l) + G_R^2/(H_R+l) - G_P^2/(H_P+l) over all (feature,
// bin) pairs whose children both hold >= min_data_in_leaf rows. Ties resolve
// to the lower feature index, then the lower bin. nullopt when no candidate
// gains more than kMinSplitGain.
std::optional<SplitCandidate> find_best_split(const NodeHistogram& hist, double lambda_l2,
                                              int min_data_in_leaf);

// --- Trees and ensembles ------------------------------------------------------

struct TreeNode {
    int feature = -1;  // < 0 marks a leaf
    int split_bin = 0;
    double threshold = 0.0;  // raw-value inclusive upper edge for the left child
    bool default_left = true;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // node 0 is the root

    int leaf_count() const;
    double predict_raw(const double* features) const;
    double predict_binned(const BinnedDataset& data, std::size_t row) const;
};

struct TreeEnsemble {
    int version = 1;
    std::string pollutant;  // free-form metadata
    LossKind loss = LossKind::MseLog;
    double quantile = 0.5;
    TransformKind transform = TransformKind::LogPlusEps;
    TrainParams params;
    int n_features = 0;
    double base_score = 0.0;
    std::vector<std::vector<double>> bin_edges;
    std::vector<Tree> trees;
    int best_iteration = 0;  // number of trees used at predict time

    // Transformed-space score through best_iteration trees.
    double predict_raw_score(const double* features) const;
    // Original units, always >= 0. Throws ValidationError on NaN features.
    double predict(const std::vector<double>& features) const;
    double predict_unchecked(const double* features) const;
};

struct TrainLog {
    std::vector<double> train_loss;  // per round, transformed space
    std::vector<double> valid_loss;
};

// Boosts leaf-wise (best gain first, depth unbounded) with per-round GOSS
// sampling for split search; leaf values are fit on all rows reaching the
// leaf. Stops after early_stopping_rounds rounds without validation
// improvement or at max_trees.
TreeEnsemble train(const TrainParams& params, const BinnedDataset& train_set,
                   const BinnedDataset& valid_set, TrainLog* log = nullptr);

// Versioned JSON with round-trip double precision.
std::string serialize(const TreeEnsemble& e);
TreeEnsemble deserialize(const std::string& bytes);
void save_model(const TreeEnsemble& e, const std::string& path);
TreeEnsemble load_model(const std::string& path);

}  // namespace airq::gbdt
