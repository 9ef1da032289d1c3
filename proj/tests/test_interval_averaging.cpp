#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <random>
#include <set>

#include "consensus/interval_averaging.hpp"
#include "consensus/rational.hpp"

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

// Oracle: the element of {{0},(0,1),{1},...,{K}} containing sum/n.
IaOutput oracle_interval(const std::vector<long>& x, int n) {
    long total = std::accumulate(x.begin(), x.end(), 0L);
    if (total % n == 0) return {true, total / n};
    return {false, total / n};  // open interval (floor, floor+1); total >= 0 here
}

void check_run(const IaRunResult& run, const std::vector<long>& x0, int n) {
    REQUIRE(run.settled);
    CHECK(run.outputs_agree);
    CHECK(run.conservation_ok);
    CHECK(run.vhat_monotone);
    CHECK(run.vhat_drops_by_two);
    CHECK(run.paths_ok);
    CHECK(run.requests_terminate_ok);
    CHECK(run.acceptance_bound_ok);
    auto want = oracle_interval(x0, n);
    CHECK(run.outputs[0] == want);
    // final pebbles: conserved sum, spread <= 1
    long total = std::accumulate(run.final_u.begin(), run.final_u.end(), 0L);
    CHECK(total == std::accumulate(x0.begin(), x0.end(), 0L));
    long lo = *std::min_element(run.final_u.begin(), run.final_u.end());
    long hi = *std::max_element(run.final_u.begin(), run.final_u.end());
    CHECK(hi - lo <= 1);
}

}  // namespace

TEST_CASE("uniform input is already settled") {
    for (long k : {0L, 1L, 3L}) {
        std::vector<long> x(5, k);
        auto run = run_interval_averaging(x, ring_graph(5), 3);
        CHECK(run.settled);
        CHECK(run.rounds == 0);
        CHECK(run.acceptances == 0);
        for (const auto& o : run.outputs) CHECK(o == IaOutput{true, k});
        CHECK(run.final_u == x);
    }
}

TEST_CASE("single edge (0,2): one transfer equalizes") {
    auto run = run_interval_averaging({0, 2}, build_snapshot(2, {{0, 1}}), 2);
    check_run(run, {0, 2}, 2);
    CHECK(run.final_u == std::vector<long>{1, 1});
    CHECK(run.acceptances == 1);
    CHECK(run.outputs[0] == IaOutput{true, 1});
}

TEST_CASE("single edge (0,1): gap below two means no transfer") {
    auto run = run_interval_averaging({0, 1}, build_snapshot(2, {{0, 1}}), 1);
    REQUIRE(run.settled);
    CHECK(run.acceptances == 0);
    CHECK(run.final_u == std::vector<long>{0, 1});
    CHECK(run.outputs[0] == IaOutput{false, 0});  // mean 1/2 in (0,1)
    CHECK(run.outputs_agree);
}

TEST_CASE("edge (0,4): the single acceptance transfers half the gap") {
    auto run = run_interval_averaging({0, 4}, build_snapshot(2, {{0, 1}}), 4);
    check_run(run, {0, 4}, 2);
    CHECK(run.final_u == std::vector<long>{2, 2});
    CHECK(run.acceptances == 1);  // w* = 2 in one exchange
}

TEST_CASE("exhaustive binary inputs on line, ring, and star match the oracle") {
    for (int n = 2; n <= 7; ++n) {
        std::vector<GraphSnapshot> graphs;
        graphs.push_back(line_graph(n));
        if (n >= 3) graphs.push_back(ring_graph(n));
        graphs.push_back(star_graph(n));
        for (const auto& g : graphs) {
            for (int mask = 0; mask < (1 << n); ++mask) {
                std::vector<long> x(n);
                for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1;
                auto run = run_interval_averaging(x, g, 1);
                REQUIRE(run.settled);
                CHECK(run.outputs_agree);
                CHECK(run.outputs[0] == oracle_interval(x, n));
            }
        }
    }
}

TEST_CASE("seeded instances: outputs, conservation, and audit invariants") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 120; ++trial) {
        std::uniform_int_distribution<int> nd(2, 16);
        std::uniform_int_distribution<long> kd(1, 4);
        int n = nd(rng);
        long K = kd(rng);
        auto g = seeded_connected_graph(n, 0.3, rng);
        std::vector<long> x(n);
        std::uniform_int_distribution<long> vd(0, K);
        for (auto& v : x) v = vd(rng);
        auto run = run_interval_averaging(x, g, K);
        check_run(run, x, n);
    }
}

TEST_CASE("bit-round accounting uses the alphabet width") {
    auto r1 = run_interval_averaging({0, 2, 1}, line_graph(3), 2);  // 2 bits for {0..2}
    CHECK(r1.bit_rounds == 2 * r1.rounds);
    auto r2 = run_interval_averaging({0, 1}, build_snapshot(2, {{0, 1}}), 1);
    CHECK(r2.bit_rounds == r2.rounds);  // 1 bit
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(run_interval_averaging({0, 5}, build_snapshot(2, {{0, 1}}), 4),
                    RunError);
    CHECK_THROWS_AS(run_interval_averaging({0, 0}, build_snapshot(2, {}), 1), RunError);
}

TEST_CASE("dumbbell lower bound: pebbles must cross the bridge") {
    for (int n : {9, 15}) {
        int m = n / 3;
        std::vector<long> x(n);
        for (int i = 0; i < n; ++i) x[i] = i < m ? 0 : (i < 2 * m ? 1 : 2);
        auto run = run_interval_averaging(x, dumbbell_graph(n), 2);
        check_run(run, x, n);
        CHECK(run.outputs[0] == IaOutput{true, 1});
        CHECK(run.rounds >= 2 * n * n / 9);
    }
}

TEST_CASE("round count stays within the frozen quadratic-in-nK budget") {
    // pilot-calibrated constant: C = 12 over the seeded corpus below
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_int_distribution<int> nd(2, 12);
        std::uniform_int_distribution<long> kd(1, 4);
        int n = nd(rng);
        long K = kd(rng);
        auto g = seeded_connected_graph(n, 0.25, rng);
        std::vector<long> x(n);
        std::uniform_int_distribution<long> vd(0, K);
        for (auto& v : x) v = vd(rng);
        auto run = run_interval_averaging(x, g, K);
        REQUIRE(run.settled);
        CHECK(run.rounds <= 12L * n * n * K * K + 8 * n + 16);
    }
}

TEST_CASE("majority via doubled binary inputs and K=2") {
    std::mt19937_64 rng(79);
    for (int n = 2; n <= 8; ++n) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<long> x(n);
            long ones = 0;
            for (int i = 0; i < n; ++i) {
                long b = (mask >> i) & 1;
                x[i] = 2 * b;
                ones += b;
            }
            auto run = run_interval_averaging(x, ring_graph(std::max(n, 3)).n() == n
                                                     ? ring_graph(n)
                                                     : line_graph(n),
                                              2);
            REQUIRE(run.settled);
            // mean(2x) > 1 <=> ones > n/2
            bool majority_ones = 2 * ones > n;
            bool decided_majority = run.outputs[0].singleton
                                        ? run.outputs[0].lo > 1
                                        : run.outputs[0].lo + 1 > 1;
            CHECK(decided_majority == majority_ones);
        }
    }
}
