#include "airq/splitter.hpp"

#include <algorithm>
#include <fstream>

#include "airq/csv.hpp"
#include "airq/errors.hpp"
#include "airq/rng.hpp"

namespace airq {

std::string to_string(FoldKind k) {
    switch (k) {
        case FoldKind::Holdout: return "holdout";
        case FoldKind::WithinNetworkKFold: return "within_network_kfold";
        case FoldKind::LeaveCountryOut: return "leave_country_out";
        case FoldKind::LeaveContinentOut: return "leave_continent_out";
    }
    return "?";
}

std::vector<std::string> FoldPlan::stations_with_label(const std::string& label) const {
    std::vector<std::string> out;
    for (const auto& [id, l] : assignments) {
        if (l == label) out.push_back(id);
    }
    return out;
}

bool FoldPlan::degenerate() const {
    for (const auto& [id, l] : assignments) {
        if (l == "train") return false;
    }
    return true;
}

std::array<std::size_t, 3> allocate_70_20_10(std::size_t n) {
    const double shares[3] = {0.7, 0.2, 0.1};
    std::array<std::size_t, 3> counts{};
    double remainders[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double exact = shares[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(exact);
        remainders[i] = exact - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    // Largest remainder first; ties favor train over validation over test.
    while (assigned < n) {
        int best = 0;
        for (int i = 1; i < 3; ++i) {
            if (remainders[i] > remainders[best]) best = i;
        }
        counts[best] += 1;
        remainders[best] = -1.0;
        assigned += 1;
    }
    return counts;
}

SplitIndices stratified_split(const FeatureMatrix& rows, const DaqiTable& daqi,
                              std::uint64_t seed) {
    if (rows.empty()) throw ValidationError("stratified_split: no rows");

    // Stratum key: (station, DAQI band of the target concentration).
    std::map<std::pair<std::string, int>, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int band = daqi.subindex(rows[i].pollutant, rows[i].target);
        strata[{rows[i].station_id, band}].push_back(i);
    }

    SplitIndices out;
    for (auto& [key, indices] : strata) {
        if (indices.size() < 3) {
            out.train.insert(out.train.end(), indices.begin(), indices.end());
            continue;
        }
        Rng rng(derive_seed(seed, key.first + "#band" + std::to_string(key.second)));
        rng.shuffle(indices);
        const auto counts = allocate_70_20_10(indices.size());
        std::size_t pos = 0;
        out.train.insert(out.train.end(), indices.begin(), indices.begin() + counts[0]);
        pos += counts[0];
        out.validation.insert(out.validation.end(), indices.begin() + pos,
                              indices.begin() + pos + counts[1]);
        pos += counts[1];
        out.test.insert(out.test.end(), indices.begin() + pos, indices.begin() + pos + counts[2]);
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.validation.begin(), out.validation.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

FoldPlan within_network_kfold(const std::vector<StationMeta>& stations, int k,
                              std::uint64_t seed) {
    if (k < 2) throw ValidationError("within_network_kfold: k must be >= 2");
    FoldPlan plan;
    plan.kind = FoldKind::WithinNetworkKFold;
    plan.seed = seed;

    std::map<std::string, std::vector<std::string>> by_network;
    for (const auto& s : stations) by_network[s.network_id].push_back(s.station_id);

    for (auto& [network, ids] : by_network) {
        std::sort(ids.begin(), ids.end());
        Rng rng(derive_seed(seed, "network:" + network));
        rng.shuffle(ids);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            plan.assignments[ids[i]] = "fold_" + std::to_string(i % static_cast<std::size_t>(k));
        }
    }
    return plan;
}

std::vector<FoldPlan> leave_group_out(const std::vector<StationMeta>& stations,
                                      Grouping grouping) {
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& s : stations) {
        const std::string key =
            grouping == Grouping::Country ? s.country_code : to_string(s.continent);
        if (key.empty()) {
            throw ValidationError("leave_group_out: station '" + s.station_id +
                                  "' has an empty group key");
        }
        groups[key].push_back(s.station_id);
    }

    std::vector<FoldPlan> plans;
    for (const auto& [held, _] : groups) {
        FoldPlan plan;
        plan.kind = grouping == Grouping::Country ? FoldKind::LeaveCountryOut
                                                  : FoldKind::LeaveContinentOut;
        plan.held_group = held;
        for (const auto& s : stations) {
            const std::string key =
                grouping == Grouping::Country ? s.country_code : to_string(s.continent);
            plan.assignments[s.station_id] = key == held ? "test" : "train";
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

void write_fold_plan(const FoldPlan& plan, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "station_id,fold_label\n";
    for (const auto& [id, label] : plan.assignments) {
        out << csv::join_record({id, label}) << "\n";
    }
}

void write_split_indices(const SplitIndices& split, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "row_index,set\n";
    for (std::size_t i : split.train) out << i << ",train\n";
    for (std::size_t i : split.validation) out << i << ",validation\n";
    for (std::size_t i : split.test) out << i << ",test\n";
}

SplitIndices read_split_indices(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows[0] != std::vector<std::string>{"row_index", "set"}) {
        throw ParseError(path + ": expected header row_index,set");
    }
    SplitIndices out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::size_t idx = static_cast<std::size_t>(csv::parse_int(rows[i][0]));
        if (rows[i][1] == "train") out.train.push_back(idx);
        else if (rows[i][1] == "validation") out.validation.push_back(idx);
        else if (rows[i][1] == "test") out.test.push_back(idx);
        else throw ParseError(path + ": unknown set label '" + rows[i][1] + "'");
    }
    return out;
}

}  // namespace airq
