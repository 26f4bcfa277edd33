#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "airq/daqi.hpp"
#include "airq/features.hpp"
#include "airq/station.hpp"

namespace airq {

enum class FoldKind { Holdout, WithinNetworkKFold, LeaveCountryOut, LeaveContinentOut };

std::string to_string(FoldKind k);

struct FoldPlan {
    FoldKind kind = FoldKind::Holdout;
    std::map<std::string, std::string> assignments;  // station_id -> fold label
    std::uint64_t seed = 0;
    std::string held_group;  // group value for leave-group-out plans

    std::vector<std::string> stations_with_label(const std::string& label) const;
    bool degenerate() const;  // leave-group-out plan whose train side is empty
};

// Row-index manifest into a FeatureMatrix; the split never copies rows.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
};

// 70/20/10 allocation of n rows with largest-remainder rounding,
// returned as (train, validation, test) counts.
std::array<std::size_t, 3> allocate_70_20_10(std::size_t n);

// DAQI-stratified split: within each (station, DAQI band) stratum rows are
// shuffled by a seed derived from (seed, station, band) and dealt 70/20/10
// with largest-remainder rounding; strata with fewer than 3 rows go entirely
// to train. The three outputs partition [0, rows.size()).
SplitIndices stratified_split(const FeatureMatrix& rows, const DaqiTable& daqi,
                              std::uint64_t seed);

// Stations of each network are shuffled by seed and dealt round-robin into k
// folds labeled "fold_0".."fold_{k-1}". Throws ValidationError for k < 2.
FoldPlan within_network_kfold(const std::vector<StationMeta>& stations, int k,
                              std::uint64_t seed);

enum class Grouping { Country, Continent };

// One plan per distinct group value; the held group is labeled "test" and all
// other stations "train". Throws ValidationError on an empty group key.
std::vector<FoldPlan> leave_group_out(const std::vector<StationMeta>& stations,
                                      Grouping grouping);

void write_fold_plan(const FoldPlan& plan, const std::string& path);
void write_split_indices(const SplitIndices& split, const std::string& path);
SplitIndices read_split_indices(const std::string& path);

}  // namespace airq
