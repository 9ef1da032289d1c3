#include "consensus/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "consensus/deadlock.hpp"
#include "consensus/function_computation.hpp"
#include "consensus/interval_averaging.hpp"
#include "consensus/load_balancing.hpp"
#include "consensus/lyapunov.hpp"
#include "consensus/quantized.hpp"

using nlohmann::json;

namespace consensus {

int thread_budget() {
    if (const char* env = std::getenv("CONSENSUS_LAB_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

namespace {

Rat json_rational(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (j.is_number_float()) {
        Rat r;
        r = j.get<double>();  // exact binary expansion of the double
        r.canonicalize();
        return r;
    }
    throw ConfigError("expected a rational (string \"p/q\", integer, or float)");
}

GraphSequence parse_graph(const json& j, std::uint64_t seed) {
    if (j.contains("family")) {
        std::map<std::string, double> params;
        if (j.contains("params"))
            for (auto& [k, v] : j.at("params").items()) params[k] = v.get<double>();
        std::uint64_t s = j.value("seed", seed);
        auto seq = generate_sequence(j.at("family").get<std::string>(), params, s);
        if (j.contains("B")) seq.set_claimed_B(j.at("B").get<int>());
        return seq;
    }
    if (!j.contains("n") || !j.contains("frames"))
        throw ConfigError("graph must give either a family or n+frames");
    int n = j.at("n").get<int>();
    std::vector<GraphSnapshot> frames;
    for (const auto& fj : j.at("frames")) {
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : fj.at("edges")) edges.push_back({e.at(0), e.at(1)});
        std::optional<std::vector<std::map<int, int>>> ports;
        if (fj.contains("ports")) {
            std::vector<std::map<int, int>> pm(n);
            int i = 0;
            for (const auto& node_ports : fj.at("ports")) {
                for (auto& [nb, p] : node_ports.items())
                    pm[i][std::stoi(nb)] = p.get<int>();
                ++i;
            }
            ports = pm;
        }
        frames.push_back(build_snapshot(n, edges, ports));
    }
    RepeatPolicy rp = RepeatPolicy::cycle;
    if (j.value("repeat", "cycle") == std::string("hold-last")) rp = RepeatPolicy::hold_last;
    auto seq = GraphSequence::scripted(std::move(frames), rp);
    if (j.contains("B")) seq.set_claimed_B(j.at("B").get<int>());
    return seq;
}

WeightScheme parse_scheme(const json& j) {
    std::string kind = j.value("kind", "metropolis");
    if (kind == "equal_neighbor") return WeightScheme::equal_neighbor();
    if (kind == "metropolis") return WeightScheme::metropolis();
    if (kind == "load_balancing") return WeightScheme::load_balancing();
    if (kind == "max_degree") {
        std::optional<Rat> eps;
        if (j.contains("epsilon")) eps = json_rational(j.at("epsilon"));
        return WeightScheme::max_degree(eps);
    }
    if (kind == "custom") {
        const auto& rows = j.at("matrix");
        int n = int(rows.size());
        Matrix<Rat> m(n);
        for (int i = 0; i < n; ++i) {
            if (int(rows[i].size()) != n) throw ConfigError("custom matrix not square");
            for (int c = 0; c < n; ++c) m(i, c) = json_rational(rows[i][c]);
        }
        return WeightScheme::custom_matrix(std::move(m));
    }
    throw ConfigError("unknown scheme kind: " + kind);
}

std::vector<Rat> parse_init(const json& j, int n, std::uint64_t seed) {
    if (j.contains("values")) {
        std::vector<Rat> x;
        for (const auto& v : j.at("values")) x.push_back(json_rational(v));
        if (int(x.size()) != n) throw ConfigError("init values: wrong length");
        return x;
    }
    std::string dist = j.value("distribution", "");
    std::uint64_t s = j.value("seed", seed);
    std::mt19937_64 rng(s + 0x5851f42d4c957f2dULL);
    std::vector<Rat> x(n);
    if (dist == "uniform") {
        Rat lo = j.contains("low") ? json_rational(j.at("low")) : Rat(0);
        Rat hi = j.contains("high") ? json_rational(j.at("high")) : Rat(1);
        std::uniform_int_distribution<long> d(0, 1'000'000);
        for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * ratio(d(rng), 1'000'000);
        return x;
    }
    if (dist == "uniform_int") {
        long lo = j.value("low", 0L), hi = j.value("high", 1L);
        std::uniform_int_distribution<long> d(lo, hi);
        for (int i = 0; i < n; ++i) x[i] = Rat(d(rng));
        return x;
    }
    throw ConfigError("init needs values or a known distribution");
}

StopRule parse_stop(const json& j) {
    std::string kind = j.value("kind", "max_steps");
    long cap = j.value("cap", 1000000L);
    if (kind == "max_steps") return StopRule::steps(j.value("value", 1000L));
    if (kind == "variance_ratio") return StopRule::variance_ratio(j.at("value").get<double>(), cap);
    if (kind == "spread_below") return StopRule::spread_below(j.at("value").get<double>(), cap);
    throw ConfigError("unknown stop kind: " + kind);
}

std::vector<double> to_doubles(const std::vector<Rat>& x) {
    std::vector<double> d;
    d.reserve(x.size());
    for (const auto& v : x) d.push_back(v.get_d());
    return d;
}

std::vector<long> to_longs(const std::vector<Rat>& x, const char* what) {
    std::vector<long> out;
    out.reserve(x.size());
    for (const auto& v : x) {
        if (v.get_den() != 1) throw ConfigError(std::string(what) + ": values must be integers");
        out.push_back(long(mpz_class(v.get_num()).get_si()));
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad JSON: ") + e.what());
    }
    try {
        ExperimentConfig cfg;
        cfg.algorithm = j.at("algorithm").get<std::string>();
        cfg.seed = j.value("seed", 0ULL);
        cfg.seq = parse_graph(j.at("graph"), cfg.seed);
        if (j.contains("scheme")) cfg.scheme = parse_scheme(j.at("scheme"));
        if (cfg.algorithm == "load_balancing") cfg.scheme = WeightScheme::load_balancing();
        int n = cfg.seq.n();
        if (j.contains("init")) cfg.x0 = parse_init(j.at("init"), n, cfg.seed);
        if (j.contains("stop")) cfg.stop = parse_stop(j.at("stop"));
        cfg.rational_backend = j.value("backend", "float") == std::string("rational");
        cfg.quantize = j.value("quantize", 0L);
        cfg.K = j.value("K", 0L);
        if (j.contains("delays")) {
            const auto& dj = j.at("delays");
            std::string pol = dj.value("policy", "none");
            if (pol == "fixed_lag")
                cfg.delays = DelaySchedule::fixed_lag_schedule(
                    dj.value("lag", 1),
                    dj.contains("B") ? std::optional<int>(dj.at("B").get<int>())
                                     : std::nullopt);
            else if (pol != "none")
                throw ConfigError("unsupported delay policy in configs: " + pol);
            cfg.has_delays = pol != "none";
        }
        if (j.contains("events"))
            for (const auto& e : j.at("events"))
                cfg.events.push_back({e.at("node").get<int>(), e.at("time").get<long>(),
                                      e.at("value").get<long>()});
        static const std::vector<std::string> known = {
            "linear", "load_balancing", "quantized", "deadlock", "max_tracking",
            "interval_averaging"};
        if (std::find(known.begin(), known.end(), cfg.algorithm) == known.end())
            throw ConfigError("unknown algorithm: " + cfg.algorithm);
        if (cfg.x0.empty() && cfg.algorithm != "max_tracking")
            throw ConfigError("init values required");
        cfg.raw = j.dump();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config schema: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
    std::string out = "step,V,underlineV,min,max,spread,messages\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%ld\n", r.step,
                      r.V, r.underlineV, r.min, r.max, r.spread, r.messages);
        out += buf;
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, bool trace,
                                const std::string& out_dir) {
    ExperimentOutput out;
    json summary;
    summary["algorithm"] = cfg.algorithm;
    summary["config_hash"] = std::to_string(std::hash<std::string>{}(cfg.raw));
    json audits = json::object();
    std::string stop_reason;
    std::vector<std::string> final_values;
    auto finish_values = [&](const auto& xs) {
        for (const auto& v : xs) {
            std::ostringstream os;
            os << v;
            final_values.push_back(os.str());
        }
    };

    if (cfg.algorithm == "linear" && cfg.quantize == 0) {
        if (cfg.rational_backend) {
            auto rec = cfg.has_delays
                           ? run_delayed(cfg.x0, cfg.seq, cfg.scheme, cfg.delays, cfg.stop)
                           : run_linear(cfg.x0, cfg.seq, cfg.scheme, cfg.stop);
            out.rows = rec.rows;
            stop_reason = rec.stop_reason;
            finish_values(rec.final_x);
        } else {
            auto x = to_doubles(cfg.x0);
            auto rec = cfg.has_delays
                           ? run_delayed(x, cfg.seq, cfg.scheme, cfg.delays, cfg.stop)
                           : run_linear(x, cfg.seq, cfg.scheme, cfg.stop);
            out.rows = rec.rows;
            stop_reason = rec.stop_reason;
            finish_values(rec.final_x);
        }
    } else if (cfg.algorithm == "load_balancing" && cfg.quantize == 0) {
        if (cfg.rational_backend) {
            auto run = run_lb(cfg.x0, cfg.seq, cfg.stop, true, trace);
            out.rows = run.record.rows;
            stop_reason = run.record.stop_reason;
            finish_values(run.record.final_x);
        } else {
            auto run = run_lb(to_doubles(cfg.x0), cfg.seq, cfg.stop, true, trace);
            out.rows = run.record.rows;
            stop_reason = run.record.stop_reason;
            finish_values(run.record.final_x);
        }
    } else if (cfg.algorithm == "quantized" || cfg.quantize > 0) {
        long Q = cfg.quantize > 0 ? cfg.quantize : 1;
        std::vector<long> units(cfg.x0.size());
        for (size_t i = 0; i < cfg.x0.size(); ++i) {
            Rat u = cfg.x0[i] * Rat(Q);
            if (u.get_den() != 1)
                throw ConfigError("quantized: initial values must be multiples of 1/Q");
            units[i] = long(mpz_class(u.get_num()).get_si());
        }
        auto run = run_quantized(units, cfg.seq, cfg.scheme, Q, cfg.stop.max_steps);
        out.rows = run.rows;
        stop_reason = run.consensus ? "consensus" : "max_steps";
        audits["consensus"] = run.consensus;
        audits["consensus_step"] = run.consensus_step;
        for (long u : run.final_units)
            final_values.push_back(std::to_string(u) + "/" + std::to_string(Q));
    } else if (cfg.algorithm == "deadlock") {
        if (cfg.rational_backend) {
            auto run = run_dp(cfg.x0, cfg.seq, cfg.stop);
            out.rows = run.record.rows;
            stop_reason = run.record.stop_reason;
            audits["involution"] = run.involution_always;
            audits["max_gap_paired"] = run.max_gap_always;
            out.assertions_ok = run.involution_always && run.max_gap_always;
            finish_values(run.record.final_x);
        } else {
            auto run = run_dp(to_doubles(cfg.x0), cfg.seq, cfg.stop);
            out.rows = run.record.rows;
            stop_reason = run.record.stop_reason;
            audits["involution"] = run.involution_always;
            audits["max_gap_paired"] = run.max_gap_always;
            out.assertions_ok = run.involution_always && run.max_gap_always;
            finish_values(run.record.final_x);
        }
    } else if (cfg.algorithm == "max_tracking") {
        if (!cfg.seq.is_static())
            throw ConfigError("max_tracking needs a static graph");
        std::vector<long> u0 = cfg.x0.empty()
                                   ? std::vector<long>(cfg.seq.n(), 0)
                                   : to_longs(cfg.x0, "max_tracking");
        auto run = run_max_tracking(u0, cfg.events, cfg.seq.frame(0), cfg.stop.max_steps);
        stop_reason = run.settled ? "settled" : "horizon";
        audits["settled"] = run.settled;
        audits["settle_time"] = run.settle_time;
        audits["forest_always"] = run.forest_always;
        audits["pointer_chains_valid"] = run.pointer_chains_valid;
        out.assertions_ok = run.forest_always && run.pointer_chains_valid;
        for (long v : run.final_estimates) final_values.push_back(std::to_string(v));
    } else if (cfg.algorithm == "interval_averaging") {
        if (!cfg.seq.is_static())
            throw ConfigError("interval_averaging needs a static graph");
        if (cfg.K < 1) throw ConfigError("interval_averaging needs K >= 1");
        auto x = to_longs(cfg.x0, "interval_averaging");
        auto run = run_interval_averaging(x, cfg.seq.frame(0), cfg.K,
                                          cfg.stop.max_steps >= 1000000
                                              ? -1
                                              : cfg.stop.max_steps);
        stop_reason = run.settled ? "settled" : "horizon";
        audits["settled"] = run.settled;
        audits["rounds"] = run.rounds;
        audits["bit_rounds"] = run.bit_rounds;
        audits["conservation"] = run.conservation_ok;
        audits["outputs_agree"] = run.outputs_agree;
        out.assertions_ok = run.conservation_ok && run.paths_ok && run.vhat_monotone;
        for (const auto& o : run.outputs)
            final_values.push_back(o.singleton ? "{" + std::to_string(o.lo) + "}"
                                               : "(" + std::to_string(o.lo) + "," +
                                                     std::to_string(o.lo + 1) + ")");
    } else {
        throw ConfigError("unknown algorithm: " + cfg.algorithm);
    }

    if (!out.rows.empty()) {
        summary["steps"] = out.rows.back().step;
        summary["final_V"] = out.rows.back().V;
        auto ct = convergence_time(out.rows, 0.01, Measure::V);
        summary["convergence_time_1pc"] = ct ? json(*ct) : json(nullptr);
    }
    summary["stop_reason"] = stop_reason;
    summary["final_values"] = final_values;
    summary["audits"] = audits;
    out.summary = summary.dump(2);

    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
        write_file(out_dir + "/metrics.csv", metrics_csv(out.rows));
        write_file(out_dir + "/summary.json", out.summary);
    }
    return out;
}

SweepTable sweep(const ExperimentConfig& base, const std::string& axis,
                 const std::vector<double>& values, int trials) {
    static const std::vector<std::string> axes = {"n", "B", "eps", "Q", "K"};
    if (std::find(axes.begin(), axes.end(), axis) == axes.end())
        throw ConfigError("unknown sweep axis: " + axis);
    json base_j = json::parse(base.raw);
    SweepTable table;
    table.axis = axis;
    for (double v : values) {
        json j = base_j;
        if (axis == "n")
            j["graph"]["params"]["n"] = long(v);
        else if (axis == "B") {
            j["graph"]["params"]["B"] = long(v);
            j["graph"]["B"] = long(v);
        } else if (axis == "eps")
            j["stop"]["value"] = v;
        else if (axis == "Q")
            j["quantize"] = long(v);
        else if (axis == "K")
            j["K"] = long(v);
        SweepCell cell;
        cell.axis_value = v;
        cell.times.assign(trials, -1);
        std::atomic<int> next{0};
        std::mutex err_mutex;
        std::exception_ptr first_error;
        auto worker = [&] {
            try {
                for (int trial = next.fetch_add(1); trial < trials;
                     trial = next.fetch_add(1)) {
                    json tj = j;
                    tj["seed"] = base.seed + std::uint64_t(trial) * 7919 + 1;
                    if (tj.contains("init")) tj["init"]["seed"] = tj["seed"];
                    auto cfg = parse_config(tj.dump());
                    auto res = run_experiment(cfg);
                    double eps = cfg.stop.kind == StopRule::Kind::variance_ratio
                                     ? cfg.stop.value
                                     : 0.01;
                    auto ct = convergence_time(res.rows, eps, Measure::V);
                    cell.times[trial] = ct ? *ct : -1;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        };
        int nthreads = std::min(thread_budget(), trials);
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
        std::vector<long> ok;
        for (long t : cell.times)
            if (t >= 0) ok.push_back(t);
        if (!ok.empty()) {
            std::sort(ok.begin(), ok.end());
            cell.median = double(ok[ok.size() / 2]);
            cell.max = double(ok.back());
        }
        table.cells.push_back(std::move(cell));
    }
    return table;
}

std::string SweepTable::csv() const {
    std::string out = axis + ",median,max,times\n";
    for (const auto& c : cells) {
        out += std::to_string(c.axis_value) + "," + std::to_string(c.median) + "," +
               std::to_string(c.max) + ",";
        for (size_t i = 0; i < c.times.size(); ++i)
            out += (i ? ";" : "") + std::to_string(c.times[i]);
        out += "\n";
    }
    return out;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("slope fit needs >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = int(xs.size());
    for (int i = 0; i < n; ++i) {
        double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

CheckReport reproduce_example(const std::string& name) {
    std::ostringstream os;
    if (name == "appendix_a") {
        auto c = appendix_a_counterexample();
        bool pass = c.v_x == 80 && c.v_y > c.v_x;
        os << "V(x)=" << c.v_x << " V(y)=" << c.v_y << " (increase: " << (c.v_y - c.v_x)
           << ")";
        return {pass, os.str()};
    }
    if (name == "fig_ic") {
        auto d = adversarial_error_demo(6, 2);
        os << "n=6 Q=2 final error " << d.final_error;
        return {d.final_error == 0.5, os.str()};
    }
    if (name == "dumbbell") {
        int n = 9;
        auto g = dumbbell_graph(n);
        std::vector<long> x0(n);
        for (int i = 0; i < n; ++i) x0[i] = i < n / 3 ? 0 : (i < 2 * n / 3 ? 1 : 2);
        auto run = run_interval_averaging(x0, g, 2);
        bool pass = run.settled && run.outputs_agree && run.outputs[0].singleton &&
                    run.outputs[0].lo == 1 && run.rounds >= 2 * n * n / 9;
        os << "rounds=" << run.rounds << " (bound " << 2 * n * n / 9 << "), output "
           << (run.outputs[0].singleton ? "{1}" : "interval");
        return {pass, os.str()};
    }
    if (name == "example1") {
        auto rec = run_example1<double>(20);
        double min_spread = 1e9;
        for (const auto& r : rec.rows) min_spread = std::min(min_spread, r.spread);
        os << "spread never below " << min_spread << " across " << rec.steps() << " steps";
        return {min_spread >= 0.5, os.str()};
    }
    if (name == "example2") {
        auto rec = run_example2<double>(25);
        double bound = 1;
        for (int k = 1; k <= 25; ++k) bound *= 1 - 2.0 / double(1L << (k + 2));
        double gap = std::abs(rec.final_x[0] - rec.final_x[1]);
        os << "final |x0-x1| = " << gap << " >= " << bound;
        return {gap >= bound - 1e-12, os.str()};
    }
    if (name == "rings") {
        bool ok = ring_equivalence_interval({0, 1, 1, 0, 2}, 2, 2, 500);
        os << "interval averaging states identical on ring(5) vs ring(10): "
           << (ok ? "yes" : "no");
        return {ok, os.str()};
    }
    return {false, "unknown example: " + name};
}

namespace {

GraphSnapshot random_connected_graph(int n, double extra_p, std::mt19937_64& rng) {
    std::set<std::pair<int, int>> edges;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int k = 1; k < n; ++k) {
        std::uniform_int_distribution<int> pick(0, k - 1);
        int a = order[pick(rng)], b = order[k];
        edges.insert({std::min(a, b), std::max(a, b)});
    }
    std::bernoulli_distribution coin(extra_p);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (coin(rng)) edges.insert({a, b});
    return GraphSnapshot(n, {edges.begin(), edges.end()});
}

bool verify_linear(std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> nd(2, 12);
        int n = nd(rng);
        auto g = random_connected_graph(n, 0.3, rng);
        std::vector<Rat> x(n);
        std::uniform_int_distribution<long> vd(-50, 50);
        for (auto& v : x) v = ratio(vd(rng), 7);
        for (auto scheme : {WeightScheme::equal_neighbor(), WeightScheme::metropolis(),
                            WeightScheme::max_degree()}) {
            auto w = build_weights<Rat>(scheme, g);
            if (!w.a.row_stochastic()) return detail = "row sums", false;
            auto y = w.a.apply(x);
            if (vec_max(y) > vec_max(x) || vec_min(y) < vec_min(x))
                return detail = "range expansion", false;
            if (scheme.kind != WeightScheme::Kind::equal_neighbor) {
                if (!w.a.symmetric()) return detail = "symmetry", false;
                if (vec_sum(y) != vec_sum(x)) return detail = "mean drift", false;
                if (variance_mean(y) > variance_mean(x)) return detail = "V increased", false;
            }
        }
    }
    detail = "20 seeded snapshots: stochasticity, range, symmetry, variance decrease";
    return true;
}

bool verify_lyapunov(std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> nd(2, 8);
        int n = nd(rng);
        auto g = random_connected_graph(n, 0.4, rng);
        auto w = build_weights<Rat>(WeightScheme::metropolis(), g);
        std::vector<Rat> x(n);
        std::uniform_int_distribution<long> vd(-20, 20);
        for (auto& v : x) v = ratio(vd(rng), 3);
        auto d = variance_decomposition(w.a, x);
        if (!d.equal) return detail = "variance identity", false;
        std::set<int> s;
        std::uniform_int_distribution<int> coin(0, 1);
        for (int i = 0; i < n; ++i)
            if (coin(rng)) s.insert(i);
        if (!s.empty() && int(s.size()) < n) {
            auto c = cut_weight(w.a, s, w.eta);
            if (!c.bound_holds) return detail = "cut bound", false;
        }
    }
    detail = "20 seeded instances: exact variance identity + cut bound";
    return true;
}

bool verify_load_balancing(std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> nd(2, 10);
        int n = nd(rng);
        auto g = random_connected_graph(n, 0.3, rng);
        std::vector<Rat> x(n);
        std::uniform_int_distribution<long> vd(0, 60);
        for (auto& v : x) v = Rat(vd(rng));
        auto [y, tr] = lb_round(x, g);
        if (vec_sum(y) != vec_sum(x)) return detail = "sum drift", false;
        if (!tr.induced_matrix.doubly_stochastic()) return detail = "not doubly stochastic", false;
        auto mp = tr.induced_matrix.min_positive_entry();
        if (mp && *mp < ratio(1, 3)) return detail = "entry below 1/3", false;
    }
    detail = "20 seeded rounds: conservation, doubly stochastic, entries >= 1/3";
    return true;
}

bool verify_quantized(std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> nd(3, 10);
        std::uniform_int_distribution<long> qd(1, 8);
        int n = nd(rng);
        long Q = qd(rng);
        auto g = random_connected_graph(n, 0.3, rng);
        std::vector<long> u(n);
        std::uniform_int_distribution<long> vd(0, Q);
        for (auto& v : u) v = vd(rng);
        long k = vec_max(u) - vec_min(u);
        auto run = run_quantized(u, GraphSequence::static_graph(g),
                                 WeightScheme::metropolis(), Q, n * k + 10);
        if (!run.consensus) return detail = "no consensus within nBK", false;
        for (size_t t = 1; t < run.rows.size(); ++t)
            if (run.rows[t].underlineV > run.rows[t - 1].underlineV + 1e-12)
                return detail = "underlineV increased", false;
    }
    detail = "10 seeded runs: consensus within nBK, underline-V monotone";
    return true;
}

bool verify_max_tracking(std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> nd(2, 12);
        int n = nd(rng);
        auto g = random_connected_graph(n, 0.3, rng);
        std::vector<long> u(n);
        std::uniform_int_distribution<long> vd(-5, 5);
        for (auto& v : u) v = vd(rng);
        auto run = run_max_tracking(u, {}, g, 6 * n + 20);
        long mx = *std::max_element(u.begin(), u.end());
        for (long e : run.final_estimates)
            if (e != mx) return detail = "wrong maximum", false;
        if (!run.forest_always || !run.pointer_chains_valid)
            return detail = "pointer invariants", false;
    }
    detail = "10 seeded graphs: estimates converge to max, forest + chain invariants";
    return true;
}

bool verify_interval_averaging(std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> nd(2, 10);
        std::uniform_int_distribution<long> kd(1, 4);
        int n = nd(rng);
        long K = kd(rng);
        auto g = random_connected_graph(n, 0.3, rng);
        std::vector<long> x(n);
        std::uniform_int_distribution<long> vd(0, K);
        for (auto& v : x) v = vd(rng);
        auto run = run_interval_averaging(x, g, K);
        if (!run.settled || !run.outputs_agree) return detail = "did not settle", false;
        if (!run.conservation_ok || !run.paths_ok || !run.vhat_monotone)
            return detail = "audit failure", false;
        long total = 0;
        for (long v : x) total += v;
        bool singleton = total % n == 0;
        long lo = singleton ? total / n : total / n;
        if (run.outputs[0].singleton != singleton || run.outputs[0].lo != lo)
            return detail = "wrong interval", false;
    }
    detail = "10 seeded runs: outputs match exact mean, audits pass";
    return true;
}

bool verify_function_computation(std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    LinearPredicate majority{{Rat(0), Rat(1)}, ratio(1, 2), false};
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> nd(2, 8);
        int n = nd(rng);
        auto g = random_connected_graph(n, 0.3, rng);
        std::vector<long> x(n);
        std::uniform_int_distribution<long> vd(0, 1);
        long ones = 0;
        for (auto& v : x) {
            v = vd(rng);
            ones += v;
        }
        auto cp = compile_predicate(majority);
        std::vector<long> q(n);
        for (int i = 0; i < n; ++i) q[i] = cp.score(x[i]);
        auto run = run_interval_averaging(q, g, cp.k_q);
        bool expect = 2 * ones <= n;
        if (cp.decide(run.outputs[0]) != expect) return detail = "majority mismatch", false;
    }
    detail = "10 seeded majority instances match the counting oracle";
    return true;
}

bool verify_deadlock(std::uint64_t seed, std::string& detail) {
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> nd(2, 10);
        int n = nd(rng);
        auto g = random_connected_graph(n, 0.3, rng);
        std::vector<Rat> x(n);
        std::uniform_int_distribution<long> vd(-30, 30);
        for (auto& v : x) v = Rat(vd(rng));
        auto run = run_dp(x, GraphSequence::static_graph(g), StopRule::steps(50));
        if (!run.involution_always || !run.max_gap_always)
            return detail = "pairing claims", false;
        if (vec_sum(run.record.final_x) != vec_sum(x)) return detail = "mean drift", false;
    }
    detail = "10 seeded runs: involution, max-gap pairing, exact conservation";
    return true;
}

bool verify_graph_core(std::uint64_t seed, std::string& detail) {
    for (int n : {4, 7, 12}) {
        if (!line_graph(n).connected() || !complete_graph(n).connected())
            return detail = "family connectivity", false;
    }
    if (!dumbbell_graph(9).connected()) return detail = "dumbbell", false;
    RandomBConnectedParams p{8, 3, 0.1, seed};
    auto seq = GraphSequence::random_b_connected(p);
    if (!check_b_connectivity(seq, 3, 30).ok) return detail = "B-connectivity", false;
    detail = "families connected; seeded random sequence is B-connected";
    return true;
}

}  // namespace

CheckReport verify_suites(const std::string& module, std::uint64_t seed) {
    using Suite = bool (*)(std::uint64_t, std::string&);
    static const std::vector<std::pair<std::string, Suite>> suites = {
        {"graph_core", verify_graph_core},
        {"linear_averaging", verify_linear},
        {"lyapunov_analysis", verify_lyapunov},
        {"load_balancing", verify_load_balancing},
        {"quantized_averaging", verify_quantized},
        {"max_tracking", verify_max_tracking},
        {"interval_averaging", verify_interval_averaging},
        {"function_computation", verify_function_computation},
        {"deadlock_pairing", verify_deadlock},
    };
    std::ostringstream os;
    bool all = true;
    bool found = false;
    for (const auto& [name, fn] : suites) {
        if (!module.empty() && module != name) continue;
        found = true;
        std::string detail;
        bool ok = fn(seed, detail);
        all = all && ok;
        os << (ok ? "[pass] " : "[FAIL] ") << name << ": " << detail << "\n";
    }
    if (!found) return {false, "unknown module: " + module};
    return {all, os.str()};
}

}  // namespace consensus
