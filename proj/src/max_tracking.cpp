#include "consensus/max_tracking.hpp"

#include <algorithm>
#include <deque>

namespace consensus {

MaxTrackRun run_max_tracking(const std::vector<long>& u0, const std::vector<InputEvent>& events,
                             const GraphSnapshot& g, long horizon) {
    int n = g.n();
    MaxTrackRun out;
    std::vector<long> u = u0;
    long last_change = 0;
    for (const auto& e : events) {
        if (e.node < 0 || e.node >= n || e.time < 1)
            throw RunError("bad input event");
        last_change = std::max(last_change, e.time);
    }
    MaxTrackSim sim(g, u0);
    MaxTrackSim prev = sim;
    out.settle_time = 0;
    std::vector<long> peak_after_freeze;  // max_i M_i(t) for t > last_change
    for (long t = 1; t <= horizon; ++t) {
        for (const auto& e : events)
            if (e.time == t) u[e.node] = e.value;
        sim.step(u);
        if (!sim.pointer_graph_is_forest()) out.forest_always = false;
        if (!sim.estimates_match_along_pointers())
            out.pointer_estimates_consistent = false;
        if (!(sim == prev)) out.settle_time = t;
        prev = sim;
        if (t > last_change) {
            long peak = sim.estimate(0);
            for (int i = 1; i < n; ++i) peak = std::max(peak, sim.estimate(i));
            peak_after_freeze.push_back(peak);
        }
    }
    // Windowed maximum of the largest estimate never increases once inputs
    // are frozen.
    long window = n;
    for (size_t t = 0; t + window < peak_after_freeze.size(); ++t) {
        long m1 = *std::max_element(peak_after_freeze.begin() + t,
                                    peak_after_freeze.begin() + t + window);
        long m2 = *std::max_element(peak_after_freeze.begin() + t + 1,
                                    peak_after_freeze.begin() + t + 1 + window);
        if (m2 > m1) out.windowed_max_monotone = false;
    }
    out.settled = horizon - out.settle_time >= 2 * n + 2;
    out.final_estimates.resize(n);
    out.final_pointers.resize(n);
    for (int i = 0; i < n; ++i) {
        out.final_estimates[i] = sim.estimate(i);
        out.final_pointers[i] = sim.pointer(i);
    }
    out.final_inputs = u;
    out.pointer_chains_valid = true;
    for (int i = 0; i < n; ++i) {
        int v = sim.follow_pointers(i);
        if (sim.pointer(v) != kSelf || u[v] != sim.estimate(i))
            out.pointer_chains_valid = false;
    }
    return out;
}

}  // namespace consensus
