#include "consensus/interval_averaging.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace consensus {

IaSim::IaSim(const GraphSnapshot& g, const std::vector<long>& u0, long K)
    : g_(&g), K_(K) {
    int n = g.n();
    if (int(u0.size()) != n) throw RunError("interval averaging: size mismatch");
    for (long v : u0)
        if (v < 0 || v > K) throw RunError("interval averaging: value outside 0..K");
    states_.resize(n);
    outbox_.resize(n);
    for (int i = 0; i < n; ++i) {
        states_[i].u = states_[i].u_prev = u0[i];
        states_[i].maxt = {u0[i], kSelf};
        states_[i].mint = {-u0[i], kSelf};
        outbox_[i].max_msg = {false, states_[i].maxt.M};
        outbox_[i].min_msg = {false, states_[i].mint.M};
    }
}

void IaSim::step() {
    int n = g_->n();
    ++t_;
    last_step_accepted_ = false;

    // Deliver: requests/accepts per node, tagged with the receiver's port for
    // the sender.
    struct Delivered {
        int port;
        long value;
        int audit_origin;
        long audit_time;
    };
    std::vector<std::vector<Delivered>> requests(n), accepts(n);
    std::vector<std::map<int, MtMessage>> max_in(n), min_in(n);
    for (int j = 0; j < n; ++j) {
        for (int i : g_->neighbors(j)) {
            max_in[i][g_->port_of(i, j)] = outbox_[j].max_msg;
            min_in[i][g_->port_of(i, j)] = outbox_[j].min_msg;
        }
        for (const auto& d : outbox_[j].directed) {
            int i = g_->neighbor_at_port(j, d.port);
            if (i < 0) throw RunError("interval averaging: message to a dead port");
            auto& bucket = d.is_request ? requests[i] : accepts[i];
            bucket.push_back({g_->port_of(i, j), d.value, d.audit_origin, d.audit_time});
        }
    }
    for (int i = 0; i < n; ++i) {
        auto by_port = [](const Delivered& a, const Delivered& b) { return a.port < b.port; };
        std::sort(requests[i].begin(), requests[i].end(), by_port);
        std::sort(accepts[i].begin(), accepts[i].end(), by_port);
    }

    std::vector<IaNodeState> next = states_;
    std::vector<IaOutbox> out(n);

    for (int i = 0; i < n; ++i) {
        const IaNodeState& s = states_[i];
        IaNodeState& ns = next[i];
        long new_u = s.u;
        auto deny = [&](const Delivered& req) {
            out[i].directed.push_back(
                {req.port, false, 0, req.audit_origin, req.audit_time});
        };

        if (s.mode == IaMode::Blocked) {
            for (const auto& req : requests[i]) deny(req);
            // Answer from downstream? Exactly the accept arriving on Rout.
            for (const auto& acc : accepts[i]) {
                if (acc.port != s.rout)
                    throw RunError("interval averaging: accept on an unexpected port");
                if (s.rin == kSelf) {
                    new_u = s.u + acc.value;  // fulfill (value 0 = denial)
                    max_request_latency_ =
                        std::max(max_request_latency_, t_ - acc.audit_time);
                } else {
                    out[i].directed.push_back(
                        {s.rin, false, acc.value, acc.audit_origin, acc.audit_time});
                }
                ns.mode = IaMode::Free;
                ns.rin = ns.rout = kNone;
            }
        } else {
            for (const auto& acc : accepts[i])
                if (acc.value != 0)
                    throw RunError("interval averaging: stray accept at a free node");
            bool u_unchanged = s.u == s.u_prev;
            long M = s.maxt.M;
            int P = s.maxt.P;
            if (!requests[i].empty()) {
                const auto& req = requests[i].front();  // smallest port wins
                long r = req.value;
                if (s.u - r >= 2) {
                    long w = (s.u - r) / 2;
                    out[i].directed.push_back(
                        {req.port, false, w, req.audit_origin, req.audit_time});
                    new_u = s.u - w;
                    ++acceptances_;
                    last_step_accepted_ = true;
                } else if (u_unchanged && s.u - 1 <= r && r < M - 1) {
                    if (P == kSelf)
                        throw RunError("interval averaging: forward with P = SELF");
                    out[i].directed.push_back(
                        {P, true, r, req.audit_origin, req.audit_time});
                    ns.mode = IaMode::Blocked;
                    ns.rin = req.port;
                    ns.rout = P;
                } else {
                    deny(req);
                }
                for (size_t k = 1; k < requests[i].size(); ++k) deny(requests[i][k]);
            } else if (u_unchanged && M >= s.u + 2) {
                if (P == kSelf)
                    throw RunError("interval averaging: originate with P = SELF");
                out[i].directed.push_back({P, true, s.u, i, t_});
                ns.mode = IaMode::Blocked;
                ns.rin = kSelf;
                ns.rout = P;
            }
        }

        // Trackers advance on the value held during this slot.
        auto mx = mt_node_step(s.maxt, s.u, s.u_prev, max_in[i]);
        ns.maxt = mx.state;
        out[i].max_msg = mx.out;
        auto mn = mt_node_step(s.mint, -s.u, -s.u_prev, min_in[i]);
        ns.mint = mn.state;
        out[i].min_msg = mn.out;

        ns.u_prev = s.u;
        ns.u = new_u;
    }

    states_ = std::move(next);
    outbox_ = std::move(out);
}

long IaSim::pebbles_in_system() const {
    long total = 0;
    for (const auto& s : states_) total += s.u;
    for (const auto& ob : outbox_)
        for (const auto& d : ob.directed)
            if (!d.is_request) total += d.value;
    return total;
}

std::vector<long> IaSim::u_hat() const {
    std::vector<long> hat;
    hat.reserve(states_.size());
    for (const auto& s : states_) hat.push_back(s.u);
    for (const auto& ob : outbox_)
        for (const auto& d : ob.directed)
            if (!d.is_request && d.audit_origin >= 0) hat[d.audit_origin] += d.value;
    return hat;
}

bool IaSim::request_paths_valid() const {
    int n = g_->n();
    // Follow rout pointers from every blocked node; chains must be acyclic
    // and back-links consistent where the successor is also blocked on us.
    for (int start = 0; start < n; ++start) {
        if (states_[start].mode != IaMode::Blocked) continue;
        std::set<int> seen{start};
        int v = start;
        while (true) {
            int w = g_->neighbor_at_port(v, states_[v].rout);
            if (w < 0) return false;
            if (states_[w].mode != IaMode::Blocked) break;  // head of the chain
            if (states_[w].rin != g_->port_of(w, v)) break;  // different request
            if (!seen.insert(w).second) return false;        // cycle
            v = w;
        }
    }
    return true;
}

IaRunResult run_interval_averaging(const std::vector<long>& x0, const GraphSnapshot& g,
                                   long K, long max_rounds) {
    if (!g.connected()) throw RunError("interval averaging: disconnected graph");
    int n = g.n();
    if (max_rounds < 0) max_rounds = 10 * long(n) * n * (K + 1) * (K + 1) + 100L * n + 1000;
    IaSim sim(g, x0, K);
    IaSim prev = sim;
    long total0 = 0;
    for (long v : x0) total0 += v;
    IaRunResult res;
    double vhat_prev = 0;
    {
        double mean = double(total0) / n;
        for (long v : x0) vhat_prev += (v - mean) * (v - mean);
    }
    long last_change = 0;
    long quiet = 0;
    for (long t = 1; t <= max_rounds; ++t) {
        sim.step();
        if (sim.pebbles_in_system() != total0) res.conservation_ok = false;
        if (!sim.request_paths_valid()) res.paths_ok = false;
        auto hat = sim.u_hat();
        double mean = double(total0) / n, vhat = 0;
        for (long v : hat) vhat += (v - mean) * (v - mean);
        if (vhat > vhat_prev + 1e-9) res.vhat_monotone = false;
        if (sim.last_step_accepted() && vhat > vhat_prev - 2 + 1e-9)
            res.vhat_drops_by_two = false;
        vhat_prev = vhat;
        if (sim == prev) {
            if (++quiet >= 8L * n) break;
        } else {
            quiet = 0;
            last_change = t;
        }
        prev = sim;
    }
    res.settled = quiet >= 8L * n;
    res.rounds = last_change;
    long bits = 0;
    while ((1L << bits) < K + 1) ++bits;
    res.bit_rounds = last_change * bits;
    res.acceptances = sim.acceptances();
    res.acceptance_bound_ok = 8 * res.acceptances <= n * K * K;
    res.requests_terminate_ok = sim.max_request_latency() <= 2L * n;
    res.final_u.resize(n);
    res.outputs.resize(n);
    for (int i = 0; i < n; ++i) {
        res.final_u[i] = sim.state(i).u;
        long hi = sim.max_estimate(i), lo = sim.min_estimate(i);
        res.outputs[i] = hi == lo ? IaOutput{true, lo} : IaOutput{false, lo};
    }
    res.outputs_agree =
        std::all_of(res.outputs.begin(), res.outputs.end(),
                    [&](const IaOutput& o) { return o == res.outputs[0]; });
    return res;
}

}  // namespace consensus
