#pragma once

#include <optional>
#include <string>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/metrics.hpp"
#include "consensus/weights.hpp"

namespace consensus {

struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MetricRow {
    long step = 0;
    double V = 0, underlineV = 0, min = 0, max = 0, spread = 0;
    long messages = 0;
};

template <class T>
struct RunRecord {
    int n = 0;
    std::vector<MetricRow> rows;             // one row per recorded step, step 0 first
    std::vector<std::vector<T>> states;      // x(0), x(1), ... when kept
    std::vector<T> final_x;
    std::string stop_reason;

    long steps() const { return rows.empty() ? 0 : rows.back().step; }

    void append(long step, const std::vector<T>& x, long messages, bool keep_states) {
        MetricRow r;
        r.step = step;
        r.V = to_double(variance_mean(x));
        r.underlineV = to_double(variance_min(x));
        r.min = to_double(vec_min(x));
        r.max = to_double(vec_max(x));
        r.spread = r.max - r.min;
        r.messages = messages;
        rows.push_back(r);
        if (keep_states) states.push_back(x);
        final_x = x;
    }
};

struct StopRule {
    enum class Kind { max_steps, variance_ratio, spread_below };
    Kind kind = Kind::max_steps;
    long max_steps = 1000000;  // hard cap in every mode
    double value = 0;          // epsilon for variance_ratio, delta for spread_below

    static StopRule steps(long t) { return {Kind::max_steps, t, 0}; }
    static StopRule variance_ratio(double eps, long cap = 1000000) {
        return {Kind::variance_ratio, cap, eps};
    }
    static StopRule spread_below(double delta, long cap = 1000000) {
        return {Kind::spread_below, cap, delta};
    }

    // True when the run may stop at the current row.
    bool satisfied(const MetricRow& row, double v0) const {
        switch (kind) {
            case Kind::max_steps: return false;  // only the cap stops it
            case Kind::variance_ratio: return row.V <= value * v0;
            case Kind::spread_below: return row.spread <= value;
        }
        return false;
    }
};

// x(t+1) = A(t) x(t) with A(t) realized from the scheme on each frame.
template <class T>
RunRecord<T> run_linear(const std::vector<T>& x0, const GraphSequence& seq,
                        const WeightScheme& scheme, const StopRule& stop,
                        bool keep_states = true) {
    if (int(x0.size()) != seq.n()) throw RunError("run_linear: size mismatch");
    if (seq.special != SpecialSequence::none)
        throw RunError("this sequence carries its own weight script; use its runner");
    RunRecord<T> rec;
    rec.n = int(x0.size());
    std::vector<T> x = x0;
    rec.append(0, x, 0, keep_states);
    double v0 = rec.rows[0].V;
    for (long t = 0; t < stop.max_steps; ++t) {
        if (stop.satisfied(rec.rows.back(), v0)) {
            rec.stop_reason = "criterion";
            return rec;
        }
        const GraphSnapshot& g = seq.frame(int(t));
        auto w = build_weights<T>(scheme, g);
        x = w.a.apply(x);
        rec.append(t + 1, x, 2L * long(g.edges().size()), keep_states);
    }
    rec.stop_reason = stop.satisfied(rec.rows.back(), v0) ? "criterion" : "max_steps";
    return rec;
}

// Delayed update: x_i(t+1) = sum_j a_ij(t) x_j(tau(i,j,t)).
template <class T>
RunRecord<T> run_delayed(const std::vector<T>& x0, const GraphSequence& seq,
                         const WeightScheme& scheme, const DelaySchedule& delays,
                         const StopRule& stop, bool keep_states = true) {
    if (int(x0.size()) != seq.n()) throw RunError("run_delayed: size mismatch");
    int n = int(x0.size());
    RunRecord<T> rec;
    rec.n = n;
    std::vector<std::vector<T>> hist{x0};
    rec.append(0, x0, 0, keep_states);
    double v0 = rec.rows[0].V;
    for (long t = 0; t < stop.max_steps; ++t) {
        if (stop.satisfied(rec.rows.back(), v0)) {
            rec.stop_reason = "criterion";
            return rec;
        }
        const GraphSnapshot& g = seq.frame(int(t));
        auto w = build_weights<T>(scheme, g);
        std::vector<T> x(n, T(0));
        for (int i = 0; i < n; ++i) {
            T acc(0);
            for (int j = 0; j < n; ++j) {
                if (w.a(i, j) == T(0)) continue;
                int tp = delays.tau(i, j, int(t));
                acc += w.a(i, j) * hist[tp][j];
            }
            x[i] = acc;
        }
        hist.push_back(x);
        rec.append(t + 1, x, 2L * long(g.edges().size()), keep_states);
    }
    rec.stop_reason = stop.satisfied(rec.rows.back(), v0) ? "criterion" : "max_steps";
    return rec;
}

// Ch. 2 ratio-of-averages estimator: run the pair (x, y) with x_i(0) =
// value_i/sigma2_i, y_i(0) = 1/sigma2_i on measured nodes and (0, 0)
// elsewhere; z_i = x_i/y_i converges to the maximum-likelihood combined
// estimate. z_i is absent while y_i = 0.
template <class T>
struct RatioEstimate {
    std::vector<std::optional<T>> z;
    RunRecord<T> x_record, y_record;
};

template <class T>
RatioEstimate<T> ratio_estimate(const std::vector<T>& values, const std::vector<T>& sigma2,
                                const std::vector<bool>& measured, const GraphSequence& seq,
                                const WeightScheme& scheme, long steps) {
    int n = seq.n();
    if (int(values.size()) != n || int(sigma2.size()) != n || int(measured.size()) != n)
        throw RunError("ratio_estimate: size mismatch");
    if (!scheme.doubly_stochastic_by_construction() &&
        scheme.kind != WeightScheme::Kind::custom)
        throw RunError("ratio_estimate needs a doubly stochastic scheme");
    bool any = false;
    std::vector<T> x(n, T(0)), y(n, T(0));
    for (int i = 0; i < n; ++i) {
        if (!measured[i]) continue;
        if (!(sigma2[i] > T(0))) throw RunError("ratio_estimate: nonpositive variance");
        x[i] = values[i] / sigma2[i];
        y[i] = T(1) / sigma2[i];
        any = true;
    }
    if (!any) throw RunError("ratio_estimate: empty measured set");
    RatioEstimate<T> out;
    out.x_record = run_linear(x, seq, scheme, StopRule::steps(steps), false);
    out.y_record = run_linear(y, seq, scheme, StopRule::steps(steps), false);
    out.z.resize(n);
    for (int i = 0; i < n; ++i)
        if (out.y_record.final_x[i] > T(0))
            out.z[i] = out.x_record.final_x[i] / out.y_record.final_x[i];
    return out;
}

// The three-node non-consensus scenario: starting from x = (0,0,1), phase k
// first lets one node pull its value up to the current maximum holder
// (averaging over the directed edge until within eps_k), then drains the old
// holder toward the remaining node; roles rotate cyclically between
// repetitions, eps_k = 2^-(k+2). The spread provably stays above 1/2.
template <class T>
RunRecord<T> run_example1(int repetitions, long phase_cap = 1000000) {
    std::vector<T> x = {T(0), T(0), T(1)};
    RunRecord<T> rec;
    rec.n = 3;
    long step = 0;
    rec.append(0, x, 0, true);
    int c = 2;  // current maximum holder
    for (int k = 1; k <= repetitions; ++k) {
        T eps = scalar_traits<T>::from_long_ratio(1, 1L << (k + 2));
        int a = (c + 1) % 3, b = (c + 2) % 3;
        // pull: x_a absorbs x_c until within eps of it
        for (long s = 0; s < phase_cap; ++s) {
            T gap = x[c] - x[a];
            if (gap < T(0)) gap = -gap;
            if (gap <= eps) break;
            x[a] = (x[a] + x[c]) / T(2);
            rec.append(++step, x, 2, true);
        }
        // drain: x_c falls toward x_b until within eps of it
        for (long s = 0; s < phase_cap; ++s) {
            T gap = x[c] - x[b];
            if (gap < T(0)) gap = -gap;
            if (gap <= eps) break;
            x[c] = (x[c] + x[b]) / T(2);
            rec.append(++step, x, 2, true);
        }
        c = a;  // the maximum has moved; roles rotate
    }
    rec.stop_reason = "script_end";
    return rec;
}

// The two-node unbounded-delay scenario: during phase k both nodes average
// against the other's value frozen at the phase start, until within eps_k of
// it; the gap's magnitude contracts by at most (1 - 2 eps_k) per phase, so
// |x_0 - x_1| stays bounded away from zero forever.
template <class T>
RunRecord<T> run_example2(int phases, long phase_cap = 1000000) {
    std::vector<T> x = {T(0), T(1)};
    RunRecord<T> rec;
    rec.n = 2;
    long step = 0;
    rec.append(0, x, 0, true);
    for (int k = 1; k <= phases; ++k) {
        T eps = scalar_traits<T>::from_long_ratio(1, 1L << (k + 2));
        T a0 = x[0], b0 = x[1];
        T gap0 = b0 - a0;
        if (gap0 < T(0)) gap0 = -gap0;
        if (gap0 == T(0)) break;
        for (long s = 0; s < phase_cap; ++s) {
            T d = b0 - x[0];
            if (d < T(0)) d = -d;
            if (d <= eps * gap0) break;
            x[0] = (x[0] + b0) / T(2);
            x[1] = (a0 + x[1]) / T(2);
            rec.append(++step, x, 2, true);
        }
    }
    rec.stop_reason = "script_end";
    return rec;
}

}  // namespace consensus
