#pragma once

#include <map>
#include <optional>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/max_tracking.hpp"

namespace consensus {

// Interval averaging: integer pebble counts u_i in {0..K} migrate from rich
// nodes to poor ones along max-tracker pointers until max - min <= 1; every
// node then knows which element of {{0},(0,1),{1},...,{K}} contains the true
// mean, read off its settled max/min trackers.

constexpr int kNone = -2;

enum class IaMode { Free, Blocked };

struct IaNodeState {
    long u = 0, u_prev = 0;
    IaMode mode = IaMode::Free;
    int rin = kNone;   // port the pending request came from, or SELF
    int rout = kNone;  // port it was sent to
    MaxTrackState maxt;  // tracks max u
    MaxTrackState mint;  // tracks min u in negated space
    bool operator==(const IaNodeState&) const = default;
};

struct IaDirected {
    int port;         // receiver-side port after delivery, sender-side before
    bool is_request;  // Request(value) vs Accept(value); Accept(0) is a denial
    long value;
    // Simulator-side audit metadata (not visible to the protocol).
    int audit_origin = -1;
    long audit_time = -1;
    bool operator==(const IaDirected& o) const {
        return port == o.port && is_request == o.is_request && value == o.value;
    }
};

struct IaOutbox {
    MtMessage max_msg, min_msg;
    std::vector<IaDirected> directed;
    bool operator==(const IaOutbox&) const = default;
};

class IaSim {
  public:
    IaSim(const GraphSnapshot& g, const std::vector<long>& u0, long K);

    void step();

    int n() const { return g_->n(); }
    long K() const { return K_; }
    const GraphSnapshot& graph() const { return *g_; }
    const IaNodeState& state(int i) const { return states_[i]; }
    long max_estimate(int i) const { return states_[i].maxt.M; }
    long min_estimate(int i) const { return -states_[i].mint.M; }
    long time() const { return t_; }

    bool operator==(const IaSim& o) const {
        return states_ == o.states_ && outbox_ == o.outbox_;
    }

    // Sum of pebbles on nodes plus pebbles riding in-flight Accept messages.
    long pebbles_in_system() const;
    // Audit value per node: u_i plus accepted pebbles in transit that answer
    // i's outstanding request.
    std::vector<long> u_hat() const;
    // Outstanding request chains follow Blocked nodes' rout pointers and must
    // stay acyclic with consistent back-links.
    bool request_paths_valid() const;

    long acceptances() const { return acceptances_; }       // w > 0 accepts so far
    bool last_step_accepted() const { return last_step_accepted_; }
    // Fulfillment latency audit: max rounds any request stayed outstanding.
    long max_request_latency() const { return max_request_latency_; }

  private:
    const GraphSnapshot* g_;
    long K_;
    long t_ = 0;
    std::vector<IaNodeState> states_;
    std::vector<IaOutbox> outbox_;
    long acceptances_ = 0;
    bool last_step_accepted_ = false;
    long max_request_latency_ = 0;
};

struct IaOutput {
    bool singleton = false;
    long lo = 0;  // singleton {lo} or open interval (lo, lo+1)
    bool operator==(const IaOutput&) const = default;
};

struct IaRunResult {
    bool settled = false;
    long rounds = 0;      // last round at which anything changed
    long bit_rounds = 0;  // rounds * ceil(log2(K+1))
    std::vector<long> final_u;
    std::vector<IaOutput> outputs;
    bool outputs_agree = false;
    // Per-step audits.
    bool conservation_ok = true;
    bool vhat_monotone = true;
    bool vhat_drops_by_two = true;
    bool paths_ok = true;
    bool requests_terminate_ok = true;  // every request resolved within 2n rounds
    long acceptances = 0;
    bool acceptance_bound_ok = true;  // <= n K^2 / 8
};

IaRunResult run_interval_averaging(const std::vector<long>& x0, const GraphSnapshot& g,
                                   long K, long max_rounds = -1);

}  // namespace consensus
