#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "airq/errors.hpp"
#include "airq/splitter.hpp"

using namespace airq;

namespace {

FeatureRow make_row(const std::string& station, double target, int hour) {
    FeatureRow r;
    r.station_id = station;
    r.network_id = "net";
    r.country_code = "ES";
    r.continent = Continent::Europe;
    r.pollutant = Pollutant::NO2;
    r.timestamp = UtcHour{hour};
    r.target = target;
    return r;
}

StationMeta make_station(const std::string& id, const std::string& network,
                         const std::string& country, Continent continent) {
    StationMeta s;
    s.station_id = id;
    s.network_id = network;
    s.country_code = country;
    s.continent = continent;
    return s;
}

bool is_partition(const SplitIndices& s, std::size_t n) {
    std::set<std::size_t> seen;
    for (const auto* part : {&s.train, &s.validation, &s.test}) {
        for (std::size_t i : *part) {
            if (!seen.insert(i).second) return false;
        }
    }
    return seen.size() == n;
}

}  // namespace

TEST_CASE("allocate_70_20_10 largest remainder") {
    CHECK(allocate_70_20_10(100) == std::array<std::size_t, 3>{70, 20, 10});
    CHECK(allocate_70_20_10(10) == std::array<std::size_t, 3>{7, 2, 1});
    CHECK(allocate_70_20_10(3) == std::array<std::size_t, 3>{2, 1, 0});
    const auto c4 = allocate_70_20_10(4);
    CHECK(c4[0] + c4[1] + c4[2] == 4);
    CHECK(c4[0] == 3);  // 2.8 floors to 2, .8 remainder wins first extra
}

TEST_CASE("stratified_split: one stratum of 100 rows splits 70/20/10") {
    FeatureMatrix rows;
    for (int i = 0; i < 100; ++i) rows.push_back(make_row("S", 10.0 + i * 0.01, i));
    const auto daqi = DaqiTable::uk_default();
    const SplitIndices s = stratified_split(rows, daqi, 1);
    CHECK(s.train.size() == 70);
    CHECK(s.validation.size() == 20);
    CHECK(s.test.size() == 10);
    CHECK(is_partition(s, 100));
}

TEST_CASE("stratified_split: stratum of 2 rows goes wholly to train") {
    FeatureMatrix rows = {make_row("S", 10.0, 0), make_row("S", 10.5, 1)};
    const SplitIndices s = stratified_split(rows, DaqiTable::uk_default(), 1);
    CHECK(s.train.size() == 2);
    CHECK(s.validation.empty());
    CHECK(s.test.empty());
}

TEST_CASE("stratified_split: deterministic under seed") {
    FeatureMatrix rows;
    for (int i = 0; i < 57; ++i) {
        rows.push_back(make_row(i % 2 ? "A" : "B", 5.0 + (i % 13) * 7.0, i));
    }
    const auto daqi = DaqiTable::uk_default();
    const SplitIndices a = stratified_split(rows, daqi, 99);
    const SplitIndices b = stratified_split(rows, daqi, 99);
    CHECK(a.train == b.train);
    CHECK(a.validation == b.validation);
    CHECK(a.test == b.test);
    const SplitIndices c = stratified_split(rows, daqi, 100);
    CHECK(a.train != c.train);  // different seed reshuffles
}

TEST_CASE("stratified_split: 10-row stratum splits 7/2/1 and bands stratify") {
    // Two DAQI bands for NO2: <=67 (band 1) and (67,134] (band 2).
    FeatureMatrix rows;
    for (int i = 0; i < 10; ++i) rows.push_back(make_row("S", 10.0 + i * 0.1, i));
    for (int i = 0; i < 10; ++i) rows.push_back(make_row("S", 100.0 + i * 0.1, 100 + i));
    const SplitIndices s = stratified_split(rows, DaqiTable::uk_default(), 5);
    CHECK(s.train.size() == 14);
    CHECK(s.validation.size() == 4);
    CHECK(s.test.size() == 2);
    CHECK(is_partition(s, 20));
    // Each band contributes exactly one test row.
    int low = 0, high = 0;
    for (std::size_t i : s.test) (rows[i].target < 67 ? low : high) += 1;
    CHECK(low == 1);
    CHECK(high == 1);
}

TEST_CASE("proportions within one row for n >= 3") {
    for (std::size_t n : {3u, 7u, 13u, 29u, 100u, 997u}) {
        const auto c = allocate_70_20_10(n);
        const double dn = static_cast<double>(n);
        CHECK(std::abs(static_cast<double>(c[0]) - 0.7 * dn) <= 1.0);
        CHECK(std::abs(static_cast<double>(c[1]) - 0.2 * dn) <= 1.0);
        CHECK(std::abs(static_cast<double>(c[2]) - 0.1 * dn) <= 1.0);
        CHECK(c[0] + c[1] + c[2] == n);
    }
}

TEST_CASE("within_network_kfold: 10 stations into 10 folds, one each") {
    std::vector<StationMeta> stations;
    for (int i = 0; i < 10; ++i) {
        stations.push_back(make_station("S" + std::to_string(i), "net", "ES", Continent::Europe));
    }
    const FoldPlan plan = within_network_kfold(stations, 10, 3);
    std::set<std::string> labels;
    for (const auto& [id, label] : plan.assignments) labels.insert(label);
    CHECK(labels.size() == 10);
    CHECK(plan.assignments.size() == 10);
}

TEST_CASE("within_network_kfold: small network populates only some folds") {
    std::vector<StationMeta> stations;
    for (int i = 0; i < 3; ++i) {
        stations.push_back(make_station("S" + std::to_string(i), "net", "ES", Continent::Europe));
    }
    const FoldPlan plan = within_network_kfold(stations, 10, 3);
    std::set<std::string> labels;
    for (const auto& [id, label] : plan.assignments) labels.insert(label);
    CHECK(labels.size() == 3);
}

TEST_CASE("within_network_kfold: round-robin balances two 20-station networks") {
    std::vector<StationMeta> stations;
    for (int n = 0; n < 2; ++n) {
        for (int i = 0; i < 20; ++i) {
            stations.push_back(make_station("N" + std::to_string(n) + "_S" + std::to_string(i),
                                            "net" + std::to_string(n), "ES", Continent::Europe));
        }
    }
    const FoldPlan plan = within_network_kfold(stations, 10, 3);
    std::map<std::string, std::map<std::string, int>> per_fold_network;
    for (const auto& [id, label] : plan.assignments) {
        per_fold_network[label][id.substr(0, 2)] += 1;
    }
    REQUIRE(per_fold_network.size() == 10);
    for (const auto& [fold, counts] : per_fold_network) {
        CHECK(counts.at("N0") == 2);
        CHECK(counts.at("N1") == 2);
    }
    CHECK_THROWS_AS(within_network_kfold(stations, 1, 3), ValidationError);
}

TEST_CASE("leave_group_out: held country absent from train") {
    std::vector<StationMeta> stations;
    for (const auto& [country, n] :
         std::vector<std::pair<std::string, int>>{{"ES", 3}, {"FR", 2}, {"DE", 4}}) {
        for (int i = 0; i < n; ++i) {
            stations.push_back(make_station(country + std::to_string(i), "net", country,
                                            Continent::Europe));
        }
    }
    const auto plans = leave_group_out(stations, Grouping::Country);
    REQUIRE(plans.size() == 3);
    for (const auto& plan : plans) {
        for (const auto& s : stations) {
            const std::string& label = plan.assignments.at(s.station_id);
            if (s.country_code == plan.held_group) CHECK(label == "test");
            else CHECK(label == "train");
        }
    }
}

TEST_CASE("leave_group_out: single country plan is degenerate") {
    std::vector<StationMeta> stations = {make_station("A", "net", "ES", Continent::Europe),
                                         make_station("B", "net", "ES", Continent::Europe)};
    const auto plans = leave_group_out(stations, Grouping::Country);
    REQUIRE(plans.size() == 1);
    CHECK(plans[0].degenerate());
}

TEST_CASE("leave_group_out: continent plans partition the station set") {
    std::vector<StationMeta> stations;
    const Continent all[] = {Continent::Asia,   Continent::Australia, Continent::SouthAmerica,
                             Continent::Africa, Continent::Europe,    Continent::NorthAmerica,
                             Continent::Oceania};
    int id = 0;
    for (Continent c : all) {
        for (int i = 0; i <= (id % 3); ++i) {
            stations.push_back(make_station("S" + std::to_string(id++) + "_" + std::to_string(i),
                                            "net", "XX", c));
        }
        ++id;
    }
    const auto plans = leave_group_out(stations, Grouping::Continent);
    CHECK(plans.size() == 7);
    std::multiset<std::string> test_ids;
    for (const auto& plan : plans) {
        for (const auto& id_label : plan.assignments) {
            if (id_label.second == "test") test_ids.insert(id_label.first);
        }
    }
    CHECK(test_ids.size() == stations.size());  // each station held out exactly once

    StationMeta bad = make_station("BAD", "net", "", Continent::Europe);
    CHECK_THROWS_AS(leave_group_out({bad}, Grouping::Country), ValidationError);
}
