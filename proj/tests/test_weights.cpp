#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "consensus/graph.hpp"
#include "consensus/weights.hpp"

using namespace consensus;

namespace {

GraphSnapshot seeded_connected_graph(int n, double p, std::mt19937_64& rng) {
    std::set<std::pair<int, int>> edges;
    for (int k = 1; k < n; ++k) {
        std::uniform_int_distribution<int> pick(0, k - 1);
        edges.insert({pick(rng), k});
    }
    std::bernoulli_distribution coin(p);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (coin(rng)) edges.insert({a, b});
    return GraphSnapshot(n, {edges.begin(), edges.end()});
}

}  // namespace

TEST_CASE("metropolis on the 3-line: exact rows, eta, double stochasticity") {
    auto w = build_weights<Rat>(WeightScheme::metropolis(), line_graph(3));
    // self-inclusive degrees (2,3,2)
    CHECK(w.a(0, 0) == ratio(2, 3));
    CHECK(w.a(0, 1) == ratio(1, 3));
    CHECK(w.a(0, 2) == 0);
    CHECK(w.a(1, 0) == ratio(1, 3));
    CHECK(w.a(1, 1) == ratio(1, 3));
    CHECK(w.a(1, 2) == ratio(1, 3));
    CHECK(w.a(2, 1) == ratio(1, 3));
    CHECK(w.a(2, 2) == ratio(2, 3));
    CHECK(w.a.doubly_stochastic());
    CHECK(w.a.symmetric());
    CHECK(w.eta == ratio(1, 3));
}

TEST_CASE("equal neighbor on the 3-line: row but not doubly stochastic") {
    auto w = build_weights<Rat>(WeightScheme::equal_neighbor(), line_graph(3));
    CHECK(w.a(0, 0) == ratio(1, 2));
    CHECK(w.a(0, 1) == ratio(1, 2));
    CHECK(w.a(1, 0) == ratio(1, 3));
    CHECK(w.a(1, 1) == ratio(1, 3));
    CHECK(w.a(1, 2) == ratio(1, 3));
    CHECK(w.a.row_stochastic());
    CHECK(!w.a.doubly_stochastic());  // column sums 5/6, 7/6, 5/6... no: 5/6,4/3,5/6
}

TEST_CASE("isolated node gives the identity") {
    for (auto s : {WeightScheme::equal_neighbor(), WeightScheme::metropolis(),
                   WeightScheme::max_degree()}) {
        auto w = build_weights<Rat>(s, build_snapshot(1, {}));
        CHECK(w.a(0, 0) == 1);
    }
}

TEST_CASE("max degree scheme") {
    SUBCASE("default epsilon = 1/(d_max+1)") {
        auto w = build_weights<Rat>(WeightScheme::max_degree(), star_graph(4));
        CHECK(w.a(1, 0) == ratio(1, 4));  // d_max = 3
        CHECK(w.a(1, 1) == ratio(3, 4));
        CHECK(w.a(0, 0) == ratio(1, 4));
        CHECK(w.a.doubly_stochastic());
        CHECK(w.a.symmetric());
    }
    SUBCASE("epsilon above the bound rejected") {
        CHECK_THROWS_AS(
            build_weights<Rat>(WeightScheme::max_degree(ratio(1, 2)), star_graph(4)),
            WeightError);
    }
    SUBCASE("explicit valid epsilon") {
        auto w = build_weights<Rat>(WeightScheme::max_degree(ratio(1, 8)), star_graph(4));
        CHECK(w.a(0, 0) == ratio(5, 8));
        CHECK(w.a.doubly_stochastic());
    }
}

TEST_CASE("custom matrices validated against Assumption-style rules") {
    Matrix<Rat> ok(2);
    ok(0, 0) = ratio(1, 2);
    ok(0, 1) = ratio(1, 2);
    ok(1, 0) = ratio(1, 2);
    ok(1, 1) = ratio(1, 2);
    auto w = build_weights<Rat>(WeightScheme::custom_matrix(ok),
                                build_snapshot(2, {{0, 1}}));
    CHECK(w.eta == ratio(1, 2));

    Matrix<Rat> bad_row = ok;
    bad_row(0, 1) = ratio(1, 3);
    CHECK_THROWS_AS(build_weights<Rat>(WeightScheme::custom_matrix(bad_row),
                                       build_snapshot(2, {{0, 1}})),
                    WeightError);

    Matrix<Rat> off_graph = ok;
    CHECK_THROWS_AS(build_weights<Rat>(WeightScheme::custom_matrix(off_graph),
                                       build_snapshot(2, {})),
                    WeightError);

    Matrix<Rat> zero_diag(2);
    zero_diag(0, 1) = 1;
    zero_diag(1, 0) = 1;
    CHECK_THROWS_AS(build_weights<Rat>(WeightScheme::custom_matrix(zero_diag),
                                       build_snapshot(2, {{0, 1}})),
                    WeightError);
}

TEST_CASE("realized matrices: stochasticity, symmetry, eta over seeded graphs") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> nd(2, 14);
        int n = nd(rng);
        auto g = seeded_connected_graph(n, 0.3, rng);
        for (auto scheme : {WeightScheme::equal_neighbor(), WeightScheme::metropolis(),
                            WeightScheme::max_degree()}) {
            auto w = build_weights<Rat>(scheme, g);
            REQUIRE(w.a.row_stochastic());
            for (int i = 0; i < n; ++i) REQUIRE(w.a(i, i) > 0);
            auto mp = w.a.min_positive_entry();
            REQUIRE(mp);
            REQUIRE(*mp == w.eta);  // every positive entry >= reported eta
            if (scheme.kind != WeightScheme::Kind::equal_neighbor) {
                REQUIRE(w.a.symmetric());
                REQUIRE(w.a.doubly_stochastic());
            }
        }
    }
}

TEST_CASE("float and rational backends agree to double precision") {
    std::mt19937_64 rng(7);
    auto g = seeded_connected_graph(9, 0.4, rng);
    for (auto scheme : {WeightScheme::equal_neighbor(), WeightScheme::metropolis()}) {
        auto wr = build_weights<Rat>(scheme, g);
        auto wf = build_weights<double>(scheme, g);
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j)
                CHECK(std::abs(wf.a(i, j) - to_double(wr.a(i, j))) < 1e-15);
    }
}
