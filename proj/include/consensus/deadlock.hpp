#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/linear.hpp"

namespace consensus {

// Appendix-B pairwise averaging with deadlock avoidance: a +/- negotiation
// in three message sub-phases against a frozen snapshot pairs disjoint node
// pairs, always including a maximum-gap edge, and each pair averages exactly.
template <class T>
struct DpRoundTrace {
    std::vector<int> partner;                  // N(i) after resolution; i if idle
    std::vector<std::pair<int, int>> pairs;    // i < j
    bool involution_ok = true;                 // N(N(i)) == i at resolution
    bool max_gap_paired = true;                // some max-gap edge is in pairs
};

template <class T>
std::pair<std::vector<T>, DpRoundTrace<T>> dp_round(const std::vector<T>& x,
                                                    const GraphSnapshot& g) {
    int n = g.n();
    if (int(x.size()) != n) throw RunError("dp_round: size mismatch");
    DpRoundTrace<T> trace;
    std::vector<int> N(n);
    std::vector<T> gap(n, T(0));
    std::vector<std::optional<int>> offer(n);

    // Step 2: offer (+) to the smallest strictly-smaller neighbor.
    for (int i = 0; i < n; ++i) {
        N[i] = i;
        std::optional<int> best;
        for (int j : g.neighbors(i))
            if (x[j] < x[i] && (!best || x[j] < x[*best])) best = j;
        if (best) {
            offer[i] = *best;
            N[i] = *best;
            gap[i] = x[i] - x[*best];
        }
    }

    // Step 3: accept the largest-gap incoming offer when it beats one's own;
    // send - to the rest and retract one's own offer when accepting.
    std::vector<std::vector<int>> minus_to(n);  // minus_to[i] = senders of - to i
    for (int i = 0; i < n; ++i) {
        std::optional<int> m;
        for (int j : g.neighbors(i)) {
            if (!offer[j] || *offer[j] != i) continue;
            if (!m || x[j] - x[i] > x[*m] - x[i]) m = j;
        }
        if (!m) continue;
        if (x[*m] - x[i] > gap[i]) {
            for (int j : g.neighbors(i))
                if (offer[j] && *offer[j] == i && j != *m) minus_to[j].push_back(i);
            if (offer[i]) minus_to[*offer[i]].push_back(i);  // retraction
            N[i] = *m;
            gap[i] = x[*m] - x[i];
        } else {
            for (int j : g.neighbors(i))
                if (offer[j] && *offer[j] == i) minus_to[j].push_back(i);
        }
    }

    // Step 4: a - from one's intended partner cancels the intent.
    std::vector<int> resolved = N;
    for (int i = 0; i < n; ++i)
        for (int s : minus_to[i])
            if (s == N[i]) {
                resolved[i] = i;
                gap[i] = T(0);
            }

    // Step 5: resolve pairs and average.
    std::vector<T> next = x;
    for (int i = 0; i < n; ++i) {
        int j = resolved[i];
        if (j == i) continue;
        if (resolved[j] != i) {
            trace.involution_ok = false;
            continue;
        }
        if (i < j) {
            trace.pairs.push_back({i, j});
            T avg = (x[i] + x[j]) / T(2);
            next[i] = next[j] = avg;
        }
    }
    trace.partner = resolved;

    // Claim audit: an edge attaining the maximum gap over E must be paired.
    T maxgap(0);
    for (auto [a, b] : g.edges()) {
        T d = x[a] > x[b] ? x[a] - x[b] : x[b] - x[a];
        if (d > maxgap) maxgap = d;
    }
    if (maxgap > T(0)) {
        bool found = false;
        for (auto [a, b] : trace.pairs) {
            T d = x[a] > x[b] ? x[a] - x[b] : x[b] - x[a];
            if (d == maxgap) found = true;
        }
        trace.max_gap_paired = found;
    }
    return {std::move(next), std::move(trace)};
}

template <class T>
struct DpRun {
    RunRecord<T> record;
    bool involution_always = true;
    bool max_gap_always = true;
};

template <class T>
DpRun<T> run_dp(const std::vector<T>& x0, const GraphSequence& seq, const StopRule& stop,
                bool keep_states = true) {
    if (int(x0.size()) != seq.n()) throw RunError("run_dp: size mismatch");
    DpRun<T> out;
    out.record.n = int(x0.size());
    std::vector<T> x = x0;
    out.record.append(0, x, 0, keep_states);
    double v0 = out.record.rows[0].V;
    for (long t = 0; t < stop.max_steps; ++t) {
        if (stop.satisfied(out.record.rows.back(), v0)) {
            out.record.stop_reason = "criterion";
            return out;
        }
        const GraphSnapshot& g = seq.frame(int(t));
        auto [next, trace] = dp_round(x, g);
        if (!trace.involution_ok) out.involution_always = false;
        if (!trace.max_gap_paired) out.max_gap_always = false;
        long msgs = 2L * long(g.edges().size());  // value broadcast
        for (int i = 0; i < out.record.n; ++i) msgs += long(trace.partner[i] != i);
        x = std::move(next);
        out.record.append(t + 1, x, msgs, keep_states);
    }
    out.record.stop_reason =
        stop.satisfied(out.record.rows.back(), v0) ? "criterion" : "max_steps";
    return out;
}

}  // namespace consensus
