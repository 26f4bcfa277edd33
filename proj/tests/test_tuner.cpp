#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "airq/errors.hpp"
#include "airq/rng.hpp"
#include "airq/tuner.hpp"

using namespace airq;

namespace {

SearchSpace small_space() {
    SearchSpace s;
    s.num_leaves_min = 4;
    s.num_leaves_max = 64;
    s.min_data_in_leaf_min = 5;
    s.min_data_in_leaf_max = 50;
    s.lambda_l2_min = 1e-3;
    s.lambda_l2_max = 10.0;
    return s;
}

}  // namespace

TEST_CASE("sample_param_sets: five in-bounds draws with fixed fields") {
    const auto sets = sample_param_sets(small_space(), 5, 17);
    REQUIRE(sets.size() == 5);
    for (const auto& p : sets) {
        CHECK(p.num_leaves >= 4);
        CHECK(p.num_leaves <= 64);
        CHECK(p.min_data_in_leaf >= 5);
        CHECK(p.min_data_in_leaf <= 50);
        CHECK(p.lambda_l2 >= 1e-3);
        CHECK(p.lambda_l2 <= 10.0);
        CHECK(p.max_bin == 63);
        CHECK(p.early_stopping_rounds == 10);
        CHECK(p.loss == gbdt::LossKind::MseLog);
    }
}

TEST_CASE("sample_param_sets: default space matches the searched ranges") {
    SearchSpace s;  // paper-range defaults
    const auto sets = sample_param_sets(s, 5, 1);
    for (const auto& p : sets) {
        CHECK(p.num_leaves >= 1000);
        CHECK(p.num_leaves <= 4095);
    }
}

TEST_CASE("sample_param_sets: degenerate single-point space") {
    SearchSpace s = small_space();
    s.num_leaves_min = s.num_leaves_max = 31;
    s.min_data_in_leaf_min = s.min_data_in_leaf_max = 20;
    s.lambda_l2_min = s.lambda_l2_max = 0.5;
    const auto sets = sample_param_sets(s, 4, 3);
    for (const auto& p : sets) {
        CHECK(p.num_leaves == 31);
        CHECK(p.min_data_in_leaf == 20);
        CHECK(p.lambda_l2 == 0.5);
    }
}

TEST_CASE("sample_param_sets: deterministic under seed") {
    const auto a = sample_param_sets(small_space(), 5, 7);
    const auto b = sample_param_sets(small_space(), 5, 7);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(a[i].num_leaves == b[i].num_leaves);
        CHECK(a[i].min_data_in_leaf == b[i].min_data_in_leaf);
        CHECK(a[i].lambda_l2 == b[i].lambda_l2);
    }
    const auto c = sample_param_sets(small_space(), 5, 8);
    bool any_diff = false;
    for (std::size_t i = 0; i < 5; ++i) any_diff = any_diff || a[i].num_leaves != c[i].num_leaves;
    CHECK(any_diff);

    SearchSpace bad = small_space();
    bad.num_leaves_min = 100;
    bad.num_leaves_max = 50;
    CHECK_THROWS_AS(sample_param_sets(bad, 5, 1), ValidationError);
    CHECK_THROWS_AS(sample_param_sets(small_space(), 0, 1), ValidationError);
}

TEST_CASE("select_best: argmin, tie to earliest, NaN rejected") {
    gbdt::TrainParams a, b, c;
    a.num_leaves = 10;
    b.num_leaves = 20;
    c.num_leaves = 30;
    const std::vector<TuneResult> results = {{a, 3.0}, {b, 1.0}, {c, 2.0}};
    CHECK(select_best(results).num_leaves == 20);
    CHECK(select_best_index(results) == 1);

    const std::vector<TuneResult> tie = {{a, 1.0}, {b, 1.0}};
    CHECK(select_best(tie).num_leaves == 10);

    const std::vector<TuneResult> with_nan = {{a, 1.0}, {b, std::nan("")}};
    CHECK_THROWS_AS(select_best(with_nan), ValidationError);
    CHECK_THROWS_AS(select_best({}), ValidationError);
}

TEST_CASE("selected MSE is minimal over candidates") {
    Rng rng(9);
    std::vector<TuneResult> results;
    for (int i = 0; i < 20; ++i) {
        gbdt::TrainParams p;
        p.num_leaves = 2 + i;
        results.push_back({p, rng.uniform(0.1, 9.0)});
    }
    const std::size_t best = select_best_index(results);
    for (const auto& r : results) {
        CHECK(results[best].validation_mse <= r.validation_mse);
    }
}
