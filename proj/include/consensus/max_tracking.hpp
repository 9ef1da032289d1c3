#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/linear.hpp"

namespace consensus {

// Port value meaning "points at itself".
constexpr int kSelf = -1;

// Tracks max_i u_i(t) of time-varying inputs on a fixed graph. Each node
// keeps an estimate M and a pointer P (a port, or SELF) toward the node the
// estimate came from, and broadcasts one message per round: either Restart
// (purge estimates flowing through me) or Estimate(M).
//
// Slot operations, in priority order:
//   O1  input changed           -> M := u(t), P := SELF
//   O4a Restart arrived from P  -> M := u(t), P := SELF
//   O2  strictly larger incoming estimate -> adopt it, P := sender's port
//   O3/O4b                       -> hold
// A node that executed O1/O4a/O2 broadcasts Restart; otherwise Estimate(M).
// Broadcasting Restart after an adoption is what makes estimates travel at
// half the speed of restarts: adopt, pause one round, then forward.
struct MaxTrackState {
    long M = 0;
    int P = kSelf;
    bool operator==(const MaxTrackState&) const = default;
};

struct MtMessage {
    bool restart = false;
    long estimate = 0;
    bool operator==(const MtMessage&) const = default;
};

enum class MtOp { O1, O2, O3_hold, O4a };

struct MtNodeStep {
    MaxTrackState state;
    MtMessage out;
    MtOp op;
};

// inbox: port -> message received this slot.
inline MtNodeStep mt_node_step(const MaxTrackState& s, long u_t, long u_prev,
                               const std::map<int, MtMessage>& inbox) {
    MtNodeStep r{s, {}, MtOp::O3_hold};
    auto restart_out = [&] {
        r.out = {true, 0};
    };
    if (u_t != u_prev) {
        r.op = MtOp::O1;
        r.state = {u_t, kSelf};
        restart_out();
        return r;
    }
    if (s.P != kSelf) {
        auto it = inbox.find(s.P);
        if (it != inbox.end() && it->second.restart) {
            r.op = MtOp::O4a;
            r.state = {u_t, kSelf};
            restart_out();
            return r;
        }
    }
    std::optional<std::pair<long, int>> best;  // (estimate, port); smallest port wins ties
    for (const auto& [port, msg] : inbox) {
        if (msg.restart) continue;
        if (!best || msg.estimate > best->first) best = {msg.estimate, port};
    }
    if (best && best->first > s.M) {
        r.op = MtOp::O2;
        r.state = {best->first, best->second};
        restart_out();
        return r;
    }
    r.op = MtOp::O3_hold;
    r.out = {false, s.M};
    return r;
}

// Synchronous network of max trackers on a fixed snapshot. `negate` turns it
// into a min tracker (inputs and estimates are negated internally; estimate()
// reports the un-negated value).
class MaxTrackSim {
  public:
    MaxTrackSim(const GraphSnapshot& g, const std::vector<long>& u0, bool negate = false)
        : g_(&g), negate_(negate) {
        int n = g.n();
        if (int(u0.size()) != n) throw RunError("max tracker: size mismatch");
        u_prev_.resize(n);
        for (int i = 0; i < n; ++i) u_prev_[i] = sign(u0[i]);
        states_.resize(n);
        for (int i = 0; i < n; ++i) states_[i] = {u_prev_[i], kSelf};
        outbox_.assign(n, {false, 0});
        for (int i = 0; i < n; ++i) outbox_[i] = {false, states_[i].M};
        ops_.assign(n, MtOp::O3_hold);
    }

    // Advances one slot with the inputs holding value u_t during it.
    void step(const std::vector<long>& u_t) {
        int n = g_->n();
        std::vector<MtNodeStep> steps(n);
        for (int i = 0; i < n; ++i) {
            std::map<int, MtMessage> inbox;
            for (int j : g_->neighbors(i)) inbox[g_->port_of(i, j)] = outbox_[j];
            steps[i] = mt_node_step(states_[i], sign(u_t[i]), u_prev_[i], inbox);
        }
        for (int i = 0; i < n; ++i) {
            states_[i] = steps[i].state;
            outbox_[i] = steps[i].out;
            ops_[i] = steps[i].op;
            u_prev_[i] = sign(u_t[i]);
        }
    }

    const GraphSnapshot& graph() const { return *g_; }
    const MaxTrackState& state(int i) const { return states_[i]; }
    long estimate(int i) const { return sign(states_[i].M); }
    int pointer(int i) const { return states_[i].P; }
    MtOp op(int i) const { return ops_[i]; }
    const MtMessage& in_flight(int i) const { return outbox_[i]; }

    bool operator==(const MaxTrackSim& other) const {
        return states_ == other.states_ && outbox_ == other.outbox_ &&
               u_prev_ == other.u_prev_;
    }

    // Pointer edges (i -> P_i) excluding those with a restart in flight from
    // the target; the tracker keeps this graph a forest.
    std::vector<std::pair<int, int>> pointer_edges() const {
        std::vector<std::pair<int, int>> e;
        for (int i = 0; i < g_->n(); ++i) {
            if (states_[i].P == kSelf) continue;
            int j = g_->neighbor_at_port(i, states_[i].P);
            if (j < 0) throw RunError("max tracker: dangling pointer port");
            if (!outbox_[j].restart) e.push_back({i, j});
        }
        return e;
    }

    bool pointer_graph_is_forest() const {
        // Each node has out-degree <= 1; a cycle is the only failure mode.
        auto edges = pointer_edges();
        std::map<int, int> next;
        for (auto [i, j] : edges) next[i] = j;
        for (int start = 0; start < g_->n(); ++start) {
            int v = start, hops = 0;
            while (next.count(v) && hops <= g_->n()) {
                v = next[v];
                ++hops;
            }
            if (hops > g_->n()) return false;
        }
        return true;
    }

    // M equality along retained pointer edges.
    bool estimates_match_along_pointers() const {
        for (auto [i, j] : pointer_edges())
            if (!(states_[i].M == states_[j].M)) return false;
        return true;
    }

    // Follows P ports from i for at most n hops; returns the reached node.
    int follow_pointers(int i) const {
        int v = i;
        for (int hops = 0; hops < g_->n(); ++hops) {
            if (states_[v].P == kSelf) return v;
            v = g_->neighbor_at_port(v, states_[v].P);
        }
        return v;
    }

  private:
    long sign(long v) const { return negate_ ? -v : v; }
    const GraphSnapshot* g_;
    bool negate_;
    std::vector<MaxTrackState> states_;
    std::vector<MtMessage> outbox_;
    std::vector<long> u_prev_;
    std::vector<MtOp> ops_;
};

struct InputEvent {
    int node;
    long time;
    long value;
};

struct MaxTrackRun {
    bool settled = false;
    long settle_time = -1;  // last slot at which anything changed
    std::vector<long> final_estimates;
    std::vector<int> final_pointers;
    bool forest_always = true;
    bool pointer_estimates_consistent = true;
    bool windowed_max_monotone = true;  // after the last input change
    // At the end of the run: following P for <= n hops from every node lands
    // on a self-pointing node whose input equals the estimate.
    bool pointer_chains_valid = false;
    std::vector<long> final_inputs;
};

// Simulates the tracker under a piecewise-constant input schedule and audits
// the reconstruction invariants every slot.
MaxTrackRun run_max_tracking(const std::vector<long>& u0, const std::vector<InputEvent>& events,
                             const GraphSnapshot& g, long horizon);

}  // namespace consensus
