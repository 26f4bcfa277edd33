#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "airq/gbdt.hpp"

namespace airq {

// Randomized search space. max_bin 63, early stopping 10 and the MseLog loss
// stay fixed; only the three listed parameters are drawn.
struct SearchSpace {
    int num_leaves_min = 1000;
    int num_leaves_max = 4095;
    int min_data_in_leaf_min = 20;
    int min_data_in_leaf_max = 200;
    double lambda_l2_min = 1e-3;  // log-uniform
    double lambda_l2_max = 10.0;

    gbdt::TrainParams base;  // supplies the fixed fields (loss, rates, ...)

    void validate() const;
};

// n independent draws, uniform over the integer ranges and log-uniform over
// lambda_l2; deterministic under seed.
std::vector<gbdt::TrainParams> sample_param_sets(const SearchSpace& space, int n,
                                                 std::uint64_t seed);

struct TuneResult {
    gbdt::TrainParams params;
    double validation_mse = 0.0;
};

// Params with minimal validation MSE; ties resolve to the earliest entry.
// Throws ValidationError on an empty list or a NaN entry.
gbdt::TrainParams select_best(const std::vector<TuneResult>& results);
std::size_t select_best_index(const std::vector<TuneResult>& results);

// candidate_idx,num_leaves,min_data_in_leaf,lambda_l2,val_mse,selected
void write_tuning_report(const std::vector<TuneResult>& results, std::size_t selected_idx,
                         const std::string& path);

}  // namespace airq
