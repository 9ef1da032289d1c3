// consensus-lab: deterministic round-based experiments on distributed
// averaging, quantized consensus, and anonymous function computation.
//
// Exit codes: 0 success, 1 run-time assertion / check failure,
//             2 configuration error, 3 I/O error.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "consensus/harness.hpp"
#include "consensus/lyapunov.hpp"

using namespace consensus;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cmd_run(const std::string& config, bool trace, const std::string& out_dir) {
    auto cfg = load_config(config);
    auto res = run_experiment(cfg, trace, out_dir);
    if (trace) std::cout << metrics_csv(res.rows);
    std::cout << res.summary << "\n";
    return res.assertions_ok ? 0 : 1;
}

int cmd_sweep(const std::string& config, const std::string& axis,
              const std::string& values_csv, int trials) {
    auto cfg = load_config(config);
    std::vector<double> values;
    std::stringstream ss(values_csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) values.push_back(std::stod(tok));
    if (values.empty()) throw ConfigError("--values must list at least one number");
    auto table = sweep(cfg, axis, values, trials);
    std::cout << table.csv();
    return 0;
}

int cmd_spectral(const std::string& matrix_path) {
    auto text = slurp(matrix_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad JSON: ") + e.what());
    }
    const auto& rows = j.contains("matrix") ? j.at("matrix") : j;
    int n = int(rows.size());
    Matrix<double> a(n);
    for (int i = 0; i < n; ++i) {
        if (int(rows[i].size()) != n) throw ConfigError("matrix is not square");
        for (int c = 0; c < n; ++c) a(i, c) = rows[i][c].get<double>();
    }
    SpectralReport rep;
    try {
        rep = spectral_gap(a);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    nlohmann::json out;
    out["n"] = rep.n;
    out["eigenvalues"] = rep.eigenvalues;
    out["lambda2"] = rep.lambda2;
    out["lower_bound"] = rep.bound;
    out["in_interval"] = rep.in_interval;
    std::cout << out.dump(2) << "\n";
    return rep.in_interval ? 0 : 1;
}

int cmd_example(const std::string& name) {
    auto rep = reproduce_example(name);
    std::cout << (rep.pass ? "[pass] " : "[FAIL] ") << name << ": " << rep.detail << "\n";
    return rep.pass ? 0 : 1;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    auto rep = verify_suites(suite, seed);
    std::cout << rep.detail;
    if (!rep.pass && rep.detail.find('\n') == std::string::npos)
        std::cout << rep.detail << "\n";
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"consensus-lab: round-based consensus and averaging experiments"};
    app.require_subcommand(1);

    std::string config, out_dir, axis, values, matrix_path, example_name, suite;
    bool trace = false;
    int trials = 20;
    std::uint64_t seed = 0;

    auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
    run->add_option("--config", config, "experiment config file")->required();
    run->add_flag("--trace", trace, "print the per-step metrics CSV");
    run->add_option("--out", out_dir, "directory for metrics.csv and summary.json");

    auto* sw = app.add_subcommand("sweep", "repeat an experiment along one axis");
    sw->add_option("--config", config, "base config file")->required();
    sw->add_option("--axis", axis, "axis to vary: n, B, eps, Q, K")->required();
    sw->add_option("--values", values, "comma-separated axis values")->required();
    sw->add_option("--trials", trials, "seeded trials per value");

    auto* sp = app.add_subcommand("spectral", "eigenvalue report for a tridiagonal matrix");
    sp->add_option("--matrix", matrix_path, "JSON file with the matrix rows")->required();

    auto* ex = app.add_subcommand("example", "reproduce a named scenario");
    ex->add_option("name", example_name,
                   "example1 | example2 | fig_ic | appendix_a | dumbbell | rings")
        ->required();

    auto* ve = app.add_subcommand("verify", "run seeded invariant suites");
    ve->add_option("--suite", suite, "restrict to one module suite");
    ve->add_option("--seed", seed, "base seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config, trace, out_dir);
        if (*sw) return cmd_sweep(config, axis, values, trials);
        if (*sp) return cmd_spectral(matrix_path);
        if (*ex) return cmd_example(example_name);
        if (*ve) return cmd_verify(suite, seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
