#pragma once

#include <vector>

#include "consensus/graph.hpp"
#include "consensus/linear.hpp"
#include "consensus/load_balancing.hpp"
#include "consensus/metrics.hpp"
#include "consensus/weights.hpp"

namespace consensus {

// Quantized values are exact: a state is a vector of integer counts of 1/Q
// units. The update is x' = floor_{1/Q}(A x), i.e. in units
// u'_i = floor(sum_j a_ij u_j) with the floor toward -infinity.

// U and L are the extreme initial values; K_levels = (U-L)*Q, which in unit
// counts is simply max(units) - min(units).
struct QuantConfig {
    long Q = 1;
    long u_units = 0, l_units = 0;
    long k_levels() const { return u_units - l_units; }
};

inline QuantConfig quant_config(long Q, const std::vector<long>& units) {
    if (Q < 1) throw RunError("Q must be positive");
    return {Q, vec_max(units), vec_min(units)};
}

// units' = floor(A * units), exact.
inline std::vector<long> q_round(const std::vector<long>& units, const Matrix<Rat>& a) {
    if (int(units.size()) != a.n) throw RunError("q_round: size mismatch");
    std::vector<long> next(units.size());
    for (int i = 0; i < a.n; ++i) {
        Rat acc(0);
        for (int j = 0; j < a.n; ++j)
            if (a(i, j) != 0) acc += a(i, j) * Rat(units[j]);
        next[i] = long(floor_to_int(acc).get_si());
    }
    return next;
}

struct QuantRun {
    long Q = 1;
    std::vector<MetricRow> rows;              // metrics on the value scale
    std::vector<std::vector<long>> unit_states;
    std::vector<long> final_units;
    bool consensus = false;
    long consensus_step = -1;  // first step with all units equal
    long steps = 0;

    void append(long step, const std::vector<long>& u, long messages) {
        MetricRow r;
        r.step = step;
        std::vector<double> vals;
        vals.reserve(u.size());
        for (long v : u) vals.push_back(double(v) / double(Q));
        r.V = variance_mean(vals);
        r.underlineV = variance_min(vals);
        r.min = vec_min(vals);
        r.max = vec_max(vals);
        r.spread = r.max - r.min;
        r.messages = messages;
        rows.push_back(r);
        unit_states.push_back(u);
        final_units = u;
        if (!consensus && vec_min(u) == vec_max(u)) {
            consensus = true;
            consensus_step = step;
        }
        steps = step;
    }
};

// Runs the quantized iteration until exact consensus or the step cap. The
// scheme may be any linear weight scheme or the balancing protocol (whose
// round matrix is data-dependent: offers are computed on the current
// quantized values, then the result is floored).
inline QuantRun run_quantized(const std::vector<long>& units0, const GraphSequence& seq,
                              const WeightScheme& scheme, long Q, long max_steps) {
    if (int(units0.size()) != seq.n()) throw RunError("run_quantized: size mismatch");
    QuantRun run;
    run.Q = Q;
    std::vector<long> u = units0;
    run.append(0, u, 0);
    for (long t = 0; t < max_steps && !(vec_min(u) == vec_max(u)); ++t) {
        const GraphSnapshot& g = seq.frame(int(t));
        long messages = 2L * long(g.edges().size());
        if (scheme.kind == WeightScheme::Kind::load_balancing) {
            std::vector<Rat> x(u.begin(), u.end());
            auto [next, trace] = lb_round(x, g);
            std::vector<long> nu(u.size());
            for (size_t i = 0; i < next.size(); ++i)
                nu[i] = long(floor_to_int(next[i]).get_si());
            u = std::move(nu);
        } else {
            auto w = build_weights<Rat>(scheme, g);
            u = q_round(u, w.a);
        }
        run.append(t + 1, u, messages);
    }
    return run;
}

struct AdversaryDemo {
    long n = 0, Q = 0;
    QuantRun run;
    double final_error = 0;  // |x_f - mean(x0)|, equals 1/2 by construction
};

// Fig.-ic construction: half the nodes start at 0, half at 1; each round a
// complete subgraph over the current zeros plus exactly one value-1 node
// floors that node to 0; after n/2 rounds everything is 0 and the error from
// the true average is exactly 1/2.
inline AdversaryDemo adversarial_error_demo(int n, long Q) {
    if (n < 4 || n % 2 != 0) throw RunError("adversary demo: n must be even >= 4");
    if (Q < 1 || 2 * Q >= n) throw RunError("adversary demo: requires Q < n/2");
    AdversaryDemo demo;
    demo.n = n;
    demo.Q = Q;
    std::vector<long> u(n, 0);
    for (int i = n / 2; i < n; ++i) u[i] = Q;  // value 1
    auto seq = quantizer_adversary_sequence(n);
    demo.run = run_quantized(u, seq, WeightScheme::equal_neighbor(), Q, n / 2);
    double mean0 = 0.5;
    double final_value = double(demo.run.final_units[0]) / double(Q);
    demo.final_error = std::abs(final_value - mean0);
    return demo;
}

}  // namespace consensus
