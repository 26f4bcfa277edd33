#include "airq/tuner.hpp"

#include <cmath>
#include <fstream>

#include "airq/csv.hpp"
#include "airq/errors.hpp"
#include "airq/rng.hpp"

namespace airq {

void SearchSpace::validate() const {
    if (num_leaves_min > num_leaves_max || num_leaves_min < 2 || num_leaves_max > 4095) {
        throw ValidationError("search space: bad num_leaves range");
    }
    if (min_data_in_leaf_min > min_data_in_leaf_max || min_data_in_leaf_min < 1) {
        throw ValidationError("search space: bad min_data_in_leaf range");
    }
    if (!(lambda_l2_min > 0.0) || lambda_l2_min > lambda_l2_max) {
        throw ValidationError("search space: bad lambda_l2 range");
    }
}

std::vector<gbdt::TrainParams> sample_param_sets(const SearchSpace& space, int n,
                                                 std::uint64_t seed) {
    if (n < 1) throw ValidationError("sample_param_sets: n must be >= 1");
    space.validate();
    Rng rng(derive_seed(seed, "param_search"));
    std::vector<gbdt::TrainParams> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        gbdt::TrainParams p = space.base;
        p.num_leaves =
            static_cast<int>(rng.uniform_int(space.num_leaves_min, space.num_leaves_max));
        p.min_data_in_leaf = static_cast<int>(
            rng.uniform_int(space.min_data_in_leaf_min, space.min_data_in_leaf_max));
        p.lambda_l2 = space.lambda_l2_min == space.lambda_l2_max
                          ? space.lambda_l2_min
                          : rng.log_uniform(space.lambda_l2_min, space.lambda_l2_max);
        p.max_bin = 63;
        p.early_stopping_rounds = 10;
        p.loss = gbdt::LossKind::MseLog;
        p.validate();
        out.push_back(p);
    }
    return out;
}

std::size_t select_best_index(const std::vector<TuneResult>& results) {
    if (results.empty()) throw ValidationError("select_best: no results");
    std::size_t best = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (std::isnan(results[i].validation_mse)) {
            throw ValidationError("select_best: NaN validation MSE at candidate " +
                                  std::to_string(i));
        }
        if (results[i].validation_mse < results[best].validation_mse) best = i;
    }
    return best;
}

gbdt::TrainParams select_best(const std::vector<TuneResult>& results) {
    return results[select_best_index(results)].params;
}

void write_tuning_report(const std::vector<TuneResult>& results, std::size_t selected_idx,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "candidate_idx,num_leaves,min_data_in_leaf,lambda_l2,val_mse,selected\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        out << i << ',' << r.params.num_leaves << ',' << r.params.min_data_in_leaf << ','
            << csv::format_double(r.params.lambda_l2) << ','
            << csv::format_double(r.validation_mse) << ',' << (i == selected_idx ? 1 : 0) << "\n";
    }
}

}  // namespace airq
