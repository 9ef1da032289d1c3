#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "consensus/linear.hpp"

using namespace consensus;

TEST_CASE("consensus start is a fixed point") {
    std::vector<Rat> x0(5, ratio(7, 3));
    auto rec = run_linear(x0, GraphSequence::static_graph(ring_graph(5)),
                          WeightScheme::metropolis(), StopRule::steps(10));
    CHECK(rec.final_x == x0);
    for (const auto& r : rec.rows) CHECK(r.V == 0);
}

TEST_CASE("one step on the 2-complete graph averages exactly") {
    std::vector<Rat> x0 = {Rat(0), Rat(1)};
    auto rec = run_linear(x0, GraphSequence::static_graph(complete_graph(2)),
                          WeightScheme::metropolis(), StopRule::steps(1));
    CHECK(rec.final_x[0] == ratio(1, 2));
    CHECK(rec.final_x[1] == ratio(1, 2));
    CHECK(rec.rows[0].V == doctest::Approx(0.5));
    CHECK(rec.rows[1].V == 0);
}

TEST_CASE("doubly stochastic runs: mean exactly conserved, V and spread monotone") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> nd(2, 10);
        int n = nd(rng);
        RandomBConnectedParams p{n, 2, 0.2, rng()};
        auto seq = GraphSequence::random_b_connected(p);
        std::vector<Rat> x0(n);
        std::uniform_int_distribution<long> vd(-40, 40);
        for (auto& v : x0) v = ratio(vd(rng), 7);
        Rat mean0 = vec_mean(x0);
        auto rec = run_linear(x0, seq, WeightScheme::metropolis(), StopRule::steps(30));
        CHECK(vec_mean(rec.final_x) == mean0);
        for (size_t t = 1; t < rec.rows.size(); ++t) {
            CHECK(rec.rows[t].V <= rec.rows[t - 1].V + 1e-12);
            CHECK(rec.rows[t].spread <= rec.rows[t - 1].spread + 1e-12);
        }
    }
}

TEST_CASE("row stochastic runs stay inside the initial range") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> nd(2, 10);
        int n = nd(rng);
        RandomBConnectedParams p{n, 1, 0.3, rng()};
        auto seq = GraphSequence::random_b_connected(p);
        std::vector<double> x0(n);
        std::uniform_real_distribution<double> vd(-1, 1);
        for (auto& v : x0) v = vd(rng);
        auto rec = run_linear(x0, seq, WeightScheme::equal_neighbor(), StopRule::steps(25));
        double lo = vec_min(x0), hi = vec_max(x0);
        for (const auto& r : rec.rows) {
            CHECK(r.min >= lo - 1e-12);
            CHECK(r.max <= hi + 1e-12);
        }
    }
}

TEST_CASE("B-connected metropolis runs approach the mean") {
    RandomBConnectedParams p{8, 3, 0.15, 99};
    auto seq = GraphSequence::random_b_connected(p);
    std::vector<double> x0 = {5, -3, 2, 2, 0, 7, -1, 4};
    auto rec = run_linear(x0, seq, WeightScheme::metropolis(),
                          StopRule::variance_ratio(1e-10, 20000));
    CHECK(rec.stop_reason == "criterion");
    double mean0 = vec_mean(x0);
    for (double v : rec.final_x) CHECK(v == doctest::Approx(mean0).epsilon(1e-4));
}

TEST_CASE("stop criteria") {
    std::vector<double> x0 = {0, 1};
    auto seq = GraphSequence::static_graph(complete_graph(2));
    SUBCASE("spread_below") {
        auto rec = run_linear(x0, seq, WeightScheme::metropolis(),
                              StopRule::spread_below(0.1, 100));
        CHECK(rec.stop_reason == "criterion");
        CHECK(rec.rows.back().spread <= 0.1);
    }
    SUBCASE("max_steps runs to the cap") {
        auto rec = run_linear(x0, seq, WeightScheme::equal_neighbor(), StopRule::steps(7));
        CHECK(rec.steps() == 7);
        CHECK(rec.stop_reason == "max_steps");
    }
}

TEST_CASE("zero delays reduce run_delayed to run_linear") {
    std::vector<Rat> x0 = {Rat(3), Rat(-1), Rat(4), Rat(0)};
    auto seq = GraphSequence::static_graph(ring_graph(4));
    auto a = run_linear(x0, seq, WeightScheme::metropolis(), StopRule::steps(12));
    auto b = run_delayed(x0, seq, WeightScheme::metropolis(), DelaySchedule::none_schedule(),
                         StopRule::steps(12));
    CHECK(a.final_x == b.final_x);
}

TEST_CASE("fixed-lag delays still reach consensus on the pair") {
    std::vector<double> x0 = {0, 1};
    auto seq = GraphSequence::static_graph(complete_graph(2));
    auto rec = run_delayed(x0, seq, WeightScheme::metropolis(),
                           DelaySchedule::fixed_lag_schedule(1, 2), StopRule::steps(60));
    CHECK(rec.final_x[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rec.final_x[1] == doctest::Approx(0.5).epsilon(1e-6));
    // envelope of the oscillation shrinks
    CHECK(rec.rows.back().spread < 1e-6);
}

TEST_CASE("the three-node scripted scenario keeps the spread above 1/2") {
    auto rec = run_example1<Rat>(12);
    Rat half = ratio(1, 2);
    for (const auto& x : rec.states) {
        Rat s = vec_max(x) - vec_min(x);
        CHECK(s >= half);
    }
    CHECK(rec.steps() > 0);
}

TEST_CASE("the two-node frozen-value scenario never reaches consensus") {
    auto rec = run_example2<Rat>(18);
    Rat prod(1);
    for (int k = 1; k <= 18; ++k)
        prod *= Rat(1) - ratio(2, 1L << (k + 2));
    Rat gap = rec.final_x[1] - rec.final_x[0];
    if (gap < 0) gap = -gap;
    CHECK(gap >= prod);
    CHECK(gap > ratio(1, 2));  // product of (1 - 2^-(k+1)) stays above 1/2... conservative
}

TEST_CASE("special sequences are rejected by the generic runner") {
    auto seq = generate_sequence("example1", {});
    std::vector<Rat> x0 = {Rat(0), Rat(0), Rat(1)};
    CHECK_THROWS_AS(
        run_linear(x0, seq, WeightScheme::equal_neighbor(), StopRule::steps(5)), RunError);
}

TEST_CASE("ratio-of-averages estimator") {
    SUBCASE("all measured, equal variances -> plain mean") {
        std::vector<Rat> vals = {Rat(1), Rat(2), Rat(6)};
        std::vector<Rat> s2(3, Rat(1));
        auto est = ratio_estimate(vals, s2, {true, true, true},
                                  GraphSequence::static_graph(complete_graph(3)),
                                  WeightScheme::metropolis(), 200);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(est.z[i].has_value());
            CHECK(to_double(*est.z[i]) == doctest::Approx(3.0).epsilon(1e-6));
        }
    }
    SUBCASE("one unmeasured node converges to the lone measurement") {
        std::vector<Rat> vals = {Rat(4), Rat(0)};
        std::vector<Rat> s2 = {Rat(1), Rat(1)};
        auto est = ratio_estimate(vals, s2, {true, false},
                                  GraphSequence::static_graph(complete_graph(2)),
                                  WeightScheme::metropolis(), 100);
        for (int i = 0; i < 2; ++i) {
            REQUIRE(est.z[i].has_value());
            CHECK(to_double(*est.z[i]) == doctest::Approx(4.0).epsilon(1e-6));
        }
    }
    SUBCASE("weighted combination matches the closed form") {
        // measurements 2 (variance 1) and 6 (variance 2): (2 + 3)/(3/2) = 10/3
        std::vector<Rat> vals = {Rat(2), Rat(6), Rat(0)};
        std::vector<Rat> s2 = {Rat(1), Rat(2), Rat(1)};
        auto est = ratio_estimate(vals, s2, {true, true, false},
                                  GraphSequence::static_graph(complete_graph(3)),
                                  WeightScheme::metropolis(), 400);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(est.z[i].has_value());
            CHECK(to_double(*est.z[i]) == doctest::Approx(10.0 / 3).epsilon(1e-6));
        }
    }
    SUBCASE("empty mask and nonpositive variance rejected") {
        std::vector<Rat> vals = {Rat(1)};
        CHECK_THROWS_AS(ratio_estimate(vals, {Rat(1)}, {false},
                                       GraphSequence::static_graph(build_snapshot(1, {})),
                                       WeightScheme::metropolis(), 5),
                        RunError);
        CHECK_THROWS_AS(ratio_estimate(vals, {Rat(0)}, {true},
                                       GraphSequence::static_graph(build_snapshot(1, {})),
                                       WeightScheme::metropolis(), 5),
                        RunError);
    }
}
