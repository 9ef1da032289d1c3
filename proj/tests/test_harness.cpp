#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <string>

#include "consensus/harness.hpp"

using namespace consensus;

namespace {

const char* kLinearConfig = R"({
  "algorithm": "linear",
  "seed": 7,
  "graph": {"family": "line", "params": {"n": 5}},
  "scheme": {"kind": "metropolis"},
  "init": {"values": [1, 0, 0, 0, 0]},
  "stop": {"kind": "variance_ratio", "value": 1e-4, "cap": 20000}
})";

}  // namespace

TEST_CASE("config parsing: schema, defaults, and errors") {
    SUBCASE("well-formed linear config") {
        auto cfg = parse_config(kLinearConfig);
        CHECK(cfg.algorithm == "linear");
        CHECK(cfg.seq.n() == 5);
        CHECK(cfg.x0.size() == 5);
        CHECK(cfg.x0[0] == 1);
        CHECK(!cfg.rational_backend);
    }
    SUBCASE("rational values as strings") {
        auto cfg = parse_config(R"({"algorithm":"linear","backend":"rational",
            "graph":{"family":"complete","params":{"n":2}},
            "init":{"values":["1/3","2/3"]}})");
        CHECK(cfg.rational_backend);
        CHECK(cfg.x0[0] == ratio(1, 3));
        CHECK(cfg.x0[1] == ratio(2, 3));
    }
    SUBCASE("explicit frames") {
        auto cfg = parse_config(R"({"algorithm":"linear",
            "graph":{"n":3,"frames":[{"edges":[[0,1]]},{"edges":[[1,2]]}],
                     "repeat":"cycle","B":2},
            "init":{"values":[0,1,2]}})");
        CHECK(cfg.seq.n() == 3);
        CHECK(cfg.seq.frame(0).degree(0) == 1);
        CHECK(cfg.seq.frame(1).degree(0) == 0);
        CHECK(cfg.seq.frame(2).degree(0) == 1);  // cycled
    }
    SUBCASE("unknown algorithm rejected") {
        CHECK_THROWS_AS(parse_config(R"({"algorithm":"gossip",
            "graph":{"family":"line","params":{"n":3}},
            "init":{"values":[0,1,2]}})"),
                        ConfigError);
    }
    SUBCASE("malformed JSON rejected") {
        CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    }
    SUBCASE("missing init rejected for value algorithms") {
        CHECK_THROWS_AS(parse_config(R"({"algorithm":"linear",
            "graph":{"family":"line","params":{"n":3}}})"),
                        ConfigError);
    }
    SUBCASE("wrong init length rejected") {
        CHECK_THROWS_AS(parse_config(R"({"algorithm":"linear",
            "graph":{"family":"line","params":{"n":3}},
            "init":{"values":[0,1]}})"),
                        ConfigError);
    }
    SUBCASE("missing file is an I/O error") {
        CHECK_THROWS_AS(load_config("/nonexistent/path.json"), IoError);
    }
}

TEST_CASE("metrics CSV header and determinism of a seeded run") {
    auto cfg = parse_config(kLinearConfig);
    auto out1 = run_experiment(cfg);
    auto out2 = run_experiment(cfg);
    auto csv1 = metrics_csv(out1.rows);
    CHECK(csv1.rfind("step,V,underlineV,min,max,spread,messages\n", 0) == 0);
    CHECK(csv1 == metrics_csv(out2.rows));
    CHECK(out1.summary == out2.summary);
    CHECK(out1.assertions_ok);
    CHECK(out1.rows.front().V > out1.rows.back().V);
}

TEST_CASE("each algorithm runs end to end from a config") {
    SUBCASE("load balancing") {
        auto out = run_experiment(parse_config(R"({"algorithm":"load_balancing",
            "graph":{"family":"ring","params":{"n":6}},
            "init":{"values":[6,0,0,0,0,0]},
            "stop":{"kind":"max_steps","value":200}})"));
        CHECK(out.assertions_ok);
        CHECK(out.rows.back().spread < 6);
    }
    SUBCASE("quantized") {
        auto out = run_experiment(parse_config(R"({"algorithm":"quantized",
            "quantize": 2,
            "graph":{"family":"line","params":{"n":4}},
            "init":{"values":[0,"1/2",1,"3/2"]},
            "stop":{"kind":"max_steps","value":100}})"));
        CHECK(out.assertions_ok);
        CHECK(out.summary.find("\"consensus\": true") != std::string::npos);
    }
    SUBCASE("quantized rejects off-grid start") {
        CHECK_THROWS_AS(run_experiment(parse_config(R"({"algorithm":"quantized",
            "quantize": 2,
            "graph":{"family":"line","params":{"n":2}},
            "init":{"values":["1/3",0]},
            "stop":{"kind":"max_steps","value":10}})")),
                        ConfigError);
    }
    SUBCASE("deadlock pairing") {
        auto out = run_experiment(parse_config(R"({"algorithm":"deadlock",
            "backend":"rational",
            "graph":{"family":"complete","params":{"n":5}},
            "init":{"values":[0,1,2,3,4]},
            "stop":{"kind":"variance_ratio","value":0.01,"cap":2000}})"));
        CHECK(out.assertions_ok);
        CHECK(out.summary.find("\"involution\": true") != std::string::npos);
    }
    SUBCASE("max tracking") {
        auto out = run_experiment(parse_config(R"({"algorithm":"max_tracking",
            "graph":{"family":"ring","params":{"n":5}},
            "init":{"values":[3,1,4,1,5]},
            "events":[{"node":4,"time":10,"value":0}],
            "stop":{"kind":"max_steps","value":120}})"));
        CHECK(out.assertions_ok);
        CHECK(out.summary.find("\"settled\": true") != std::string::npos);
    }
    SUBCASE("interval averaging") {
        auto out = run_experiment(parse_config(R"({"algorithm":"interval_averaging",
            "K": 2,
            "graph":{"family":"star","params":{"n":5}},
            "init":{"values":[2,0,0,2,2]}})"));
        CHECK(out.assertions_ok);
        CHECK(out.summary.find("\"outputs_agree\": true") != std::string::npos);
    }
    SUBCASE("interval averaging needs K") {
        CHECK_THROWS_AS(run_experiment(parse_config(R"({"algorithm":"interval_averaging",
            "graph":{"family":"line","params":{"n":3}},
            "init":{"values":[0,1,0]}})")),
                        ConfigError);
    }
}

TEST_CASE("sweep results do not depend on the worker count") {
    auto base = parse_config(R"({"algorithm":"linear","seed":11,
        "graph":{"family":"random_b_connected","params":{"n":8,"B":2,"p":0.2}},
        "init":{"distribution":"uniform_int","low":0,"high":8},
        "stop":{"kind":"variance_ratio","value":0.01,"cap":20000}})");
    setenv("CONSENSUS_LAB_THREADS", "1", 1);
    auto serial = sweep(base, "n", {6, 10}, 4);
    setenv("CONSENSUS_LAB_THREADS", "4", 1);
    auto parallel = sweep(base, "n", {6, 10}, 4);
    unsetenv("CONSENSUS_LAB_THREADS");
    CHECK(serial.csv() == parallel.csv());
    REQUIRE(serial.cells.size() == 2);
    for (const auto& c : serial.cells) {
        CHECK(c.times.size() == 4);
        for (long t : c.times) CHECK(t > 0);
    }
}

TEST_CASE("thread budget reads the environment override") {
    setenv("CONSENSUS_LAB_THREADS", "3", 1);
    CHECK(thread_budget() == 3);
    unsetenv("CONSENSUS_LAB_THREADS");
    CHECK(thread_budget() >= 1);
}

TEST_CASE("log-log slope fit recovers exact power laws") {
    CHECK(loglog_slope({1, 2, 4, 8}, {1, 4, 16, 64}) == doctest::Approx(2.0));
    CHECK(loglog_slope({8, 16, 32}, {3, 3, 3}) == doctest::Approx(0.0));
    CHECK(loglog_slope({1, 10, 100}, {5, 50, 500}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), std::invalid_argument);
}

TEST_CASE("bundled worked examples reproduce") {
    for (const char* name :
         {"appendix_a", "fig_ic", "dumbbell", "example1", "example2", "rings"}) {
        auto rep = reproduce_example(name);
        INFO(name << ": " << rep.detail);
        CHECK(rep.pass);
    }
    CHECK(!reproduce_example("no_such_example").pass);
}

TEST_CASE("verification suites pass for every module") {
    for (const char* m : {"graph_core", "linear_averaging", "lyapunov_analysis",
                          "load_balancing", "quantized_averaging", "max_tracking",
                          "interval_averaging", "function_computation",
                          "deadlock_pairing"}) {
        auto rep = verify_suites(m, 2024);
        INFO(m << ": " << rep.detail);
        CHECK(rep.pass);
    }
    CHECK(!verify_suites("no_such_module", 1).pass);
}
