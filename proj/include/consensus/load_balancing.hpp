#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/linear.hpp"
#include "consensus/weights.hpp"

namespace consensus {

// One round of the offer/accept balancing protocol. A node may both make an
// offer and accept a different incoming offer in the same round, so accepted
// transfers form chains (each node: at most one outgoing and one incoming);
// the induced matrix is I minus 1/3 of the edge Laplacian over accepted
// transfers, hence doubly stochastic and symmetric with nonzero entries
// >= 1/3.
template <class T>
struct LbRoundTrace {
    struct Offer {
        int target;
        T amount;
    };
    struct Transfer {
        int from, to;
        T amount;
    };
    std::vector<std::optional<Offer>> offers;       // per node
    std::vector<std::optional<int>> accepted_from;  // per node: sender accepted
    std::vector<Transfer> transfers;
    Matrix<T> induced_matrix;
};

template <class T>
std::pair<std::vector<T>, LbRoundTrace<T>> lb_round(const std::vector<T>& x,
                                                    const GraphSnapshot& g) {
    int n = g.n();
    if (int(x.size()) != n) throw RunError("lb_round: size mismatch");
    LbRoundTrace<T> trace;
    trace.offers.resize(n);
    trace.accepted_from.resize(n);
    T third = scalar_traits<T>::from_long_ratio(1, 3);

    // Step 2: offer one third of the gap to the smallest strictly-smaller
    // neighbor (ties to the lowest index).
    for (int c = 0; c < n; ++c) {
        std::optional<int> best;
        for (int d : g.neighbors(c))
            if (x[d] < x[c] && (!best || x[d] < x[*best])) best = d;
        if (best)
            trace.offers[c] = {*best, (x[c] - x[*best]) * third};
    }

    // Step 3: accept the largest incoming offer (ties to the lowest sender).
    for (int c = 0; c < n; ++c) {
        std::optional<int> best;
        for (int s : g.neighbors(c)) {
            if (!trace.offers[s] || trace.offers[s]->target != c) continue;
            if (!best || trace.offers[s]->amount > trace.offers[*best]->amount) best = s;
        }
        if (best) {
            trace.accepted_from[c] = *best;
            trace.transfers.push_back({*best, c, trace.offers[*best]->amount});
        }
    }

    // Steps 3-4: apply accepted transfers on both ends.
    std::vector<T> next = x;
    trace.induced_matrix = Matrix<T>::identity(n);
    for (const auto& tr : trace.transfers) {
        next[tr.from] -= tr.amount;
        next[tr.to] += tr.amount;
        trace.induced_matrix(tr.from, tr.from) -= third;
        trace.induced_matrix(tr.to, tr.to) -= third;
        trace.induced_matrix(tr.from, tr.to) += third;
        trace.induced_matrix(tr.to, tr.from) += third;
    }

    // Re-verify x' = A x.
    auto check = trace.induced_matrix.apply(x);
    for (int i = 0; i < n; ++i) {
        if constexpr (scalar_traits<T>::exact) {
            if (!(check[i] == next[i])) throw RunError("lb_round: matrix mismatch");
        } else {
            if (std::abs(check[i] - next[i]) > 1e-9)
                throw RunError("lb_round: matrix mismatch");
        }
    }
    return {std::move(next), std::move(trace)};
}

template <class T>
struct LbRun {
    RunRecord<T> record;
    std::vector<LbRoundTrace<T>> traces;  // filled when keep_traces
};

template <class T>
LbRun<T> run_lb(const std::vector<T>& x0, const GraphSequence& seq, const StopRule& stop,
                bool keep_states = true, bool keep_traces = false) {
    if (int(x0.size()) != seq.n()) throw RunError("run_lb: size mismatch");
    LbRun<T> out;
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
        auto [next, trace] = lb_round(x, g);
        long offers = 0;
        for (const auto& o : trace.offers)
            if (o) ++offers;
        x = std::move(next);
        out.record.append(t + 1, x, 2L * long(g.edges().size()) + 2 * offers, keep_states);
        if (keep_traces) out.traces.push_back(std::move(trace));
    }
    out.record.stop_reason =
        stop.satisfied(out.record.rows.back(), v0) ? "criterion" : "max_steps";
    return out;
}

}  // namespace consensus
