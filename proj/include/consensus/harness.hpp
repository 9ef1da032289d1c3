#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/linear.hpp"
#include "consensus/max_tracking.hpp"
#include "consensus/weights.hpp"

namespace consensus {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string algorithm;  // linear | load_balancing | quantized | deadlock |
                            // max_tracking | interval_averaging
    GraphSequence seq;
    WeightScheme scheme;
    std::vector<Rat> x0;
    StopRule stop;
    bool rational_backend = false;
    DelaySchedule delays;
    bool has_delays = false;
    long quantize = 0;  // Q > 0 switches the linear/lb schemes to quantized mode
    long K = 0;         // interval-averaging alphabet bound
    std::vector<InputEvent> events;  // max-tracking input changes
    std::uint64_t seed = 0;
    std::string raw;  // canonical serialized form, hashed into outputs
};

struct ExperimentOutput {
    std::vector<MetricRow> rows;
    std::string summary;  // JSON text
    bool assertions_ok = true;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
ExperimentOutput run_experiment(const ExperimentConfig& cfg, bool trace = false,
                                const std::string& out_dir = "");

std::string metrics_csv(const std::vector<MetricRow>& rows);
void write_file(const std::string& path, const std::string& content);

struct SweepCell {
    double axis_value = 0;
    std::vector<long> times;  // per-trial convergence times (-1: not reached)
    double median = 0, max = 0;
};

struct SweepTable {
    std::string axis;
    std::vector<SweepCell> cells;
    std::string csv() const;
};

// Patches the base config along the axis, runs `trials` seeded trials per
// value (parallelized up to CONSENSUS_LAB_THREADS), and reports
// convergence-time aggregates.
SweepTable sweep(const ExperimentConfig& base, const std::string& axis,
                 const std::vector<double>& values, int trials);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct CheckReport {
    bool pass = false;
    std::string detail;
};

CheckReport reproduce_example(const std::string& name);
// Seeded cross-module invariant suites; empty module means all.
CheckReport verify_suites(const std::string& module, std::uint64_t seed);

int thread_budget();  // CONSENSUS_LAB_THREADS, default hardware concurrency

}  // namespace consensus
