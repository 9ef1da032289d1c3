#include "consensus/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace consensus {

GraphSnapshot::GraphSnapshot(int n, std::vector<std::pair<int, int>> edges,
                             std::optional<std::vector<std::map<int, int>>> ports)
    : n_(n) {
    if (n < 1) throw GraphError("node count must be >= 1");
    std::set<std::pair<int, int>> seen;
    adj_.assign(n, {});
    for (auto [a, b] : edges) {
        if (a == b) throw GraphError("explicit self-loop");
        if (a > b) std::swap(a, b);
        if (a < 0 || b >= n) throw GraphError("edge endpoint out of range");
        if (!seen.insert({a, b}).second) throw GraphError("duplicate edge");
        edges_.push_back({a, b});
        adj_[a].push_back(b);
        adj_[b].push_back(a);
    }
    std::sort(edges_.begin(), edges_.end());
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());

    port_.assign(n, {});
    port_inv_.assign(n, {});
    if (ports) {
        if (int(ports->size()) != n) throw GraphError("ports: wrong node count");
        for (int i = 0; i < n; ++i) {
            const auto& pm = (*ports)[i];
            if (int(pm.size()) != degree(i)) throw GraphError("ports: wrong arity");
            std::set<int> used;
            for (auto [j, p] : pm) {
                if (!std::binary_search(adj_[i].begin(), adj_[i].end(), j))
                    throw GraphError("ports: label for a non-neighbor");
                // The repetition-lemma rings need labels drawn from {0..d};
                // they must merely be distinct per node.
                if (p < 0 || p > degree(i)) throw GraphError("ports: label out of range");
                if (!used.insert(p).second) throw GraphError("ports: duplicate label");
                port_[i][j] = p;
                port_inv_[i][p] = j;
            }
        }
    } else {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < degree(i); ++k) {
                port_[i][adj_[i][k]] = k;
                port_inv_[i][k] = adj_[i][k];
            }
    }
}

int GraphSnapshot::max_degree() const {
    int d = 0;
    for (int i = 0; i < n_; ++i) d = std::max(d, degree(i));
    return d;
}

bool GraphSnapshot::has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(i, j));
}

int GraphSnapshot::port_of(int i, int j) const {
    auto it = port_[i].find(j);
    if (it == port_[i].end()) throw GraphError("port_of: not a neighbor");
    return it->second;
}

int GraphSnapshot::neighbor_at_port(int i, int p) const {
    auto it = port_inv_[i].find(p);
    return it == port_inv_[i].end() ? -1 : it->second;
}

bool GraphSnapshot::edge_labeled() const {
    for (auto [a, b] : edges_)
        if (port_of(a, b) != port_of(b, a)) return false;
    return true;
}

bool GraphSnapshot::connected() const {
    std::vector<char> vis(n_, 0);
    std::deque<int> q{0};
    vis[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w : adj_[v])
            if (!vis[w]) {
                vis[w] = 1;
                ++count;
                q.push_back(w);
            }
    }
    return count == n_;
}

GraphSnapshot GraphSnapshot::edge_union(const std::vector<const GraphSnapshot*>& gs) {
    if (gs.empty()) throw GraphError("edge_union: empty");
    int n = gs[0]->n();
    std::set<std::pair<int, int>> edges;
    for (auto* g : gs) {
        if (g->n() != n) throw GraphError("edge_union: size mismatch");
        edges.insert(g->edges().begin(), g->edges().end());
    }
    return GraphSnapshot(n, {edges.begin(), edges.end()});
}

GraphSnapshot build_snapshot(int n, const std::vector<std::pair<int, int>>& edges,
                             std::optional<std::vector<std::map<int, int>>> ports) {
    return GraphSnapshot(n, edges, std::move(ports));
}

GraphSequence GraphSequence::scripted(std::vector<GraphSnapshot> frames, RepeatPolicy repeat) {
    if (frames.empty()) throw GraphError("scripted sequence needs frames");
    int n = frames[0].n();
    for (const auto& f : frames)
        if (f.n() != n) throw GraphError("scripted sequence: inconsistent n");
    GraphSequence s;
    s.frames_ = std::move(frames);
    s.repeat_ = repeat;
    return s;
}

GraphSequence GraphSequence::static_graph(GraphSnapshot g) {
    return scripted({std::move(g)}, RepeatPolicy::cycle);
}

GraphSequence GraphSequence::random_b_connected(const RandomBConnectedParams& params) {
    if (params.n < 1 || params.B < 1 || params.p < 0 || params.p > 1)
        throw GraphError("random_b_connected: bad params");
    GraphSequence s;
    s.rng_ = params;
    s.B_ = params.B;
    return s;
}

namespace {

// Uniform spanning tree via a random Prufer-style attachment: permute nodes
// and attach each to a uniformly chosen earlier node (uniform over a natural
// family of trees; seeded and deterministic, which is what matters here).
std::vector<std::pair<int, int>> random_tree(int n, std::mt19937_64& rng) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::pair<int, int>> edges;
    for (int k = 1; k < n; ++k) {
        std::uniform_int_distribution<int> pick(0, k - 1);
        edges.push_back({order[pick(rng)], order[k]});
    }
    return edges;
}

}  // namespace

const GraphSnapshot& GraphSequence::frame(int t) const {
    if (t < 0) throw GraphError("frame index negative");
    if (!rng_) {
        int m = int(frames_.size());
        if (t < m) return frames_[t];
        return repeat_ == RepeatPolicy::cycle ? frames_[t % m] : frames_.back();
    }
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    const auto& prm = *rng_;
    int window = t / prm.B;
    std::mt19937_64 rng(prm.seed * 0x9e3779b97f4a7c15ULL + std::uint64_t(window) + 1);
    std::uniform_int_distribution<int> pick_frame(0, prm.B - 1);
    int tree_slot = pick_frame(rng);
    auto tree = random_tree(prm.n, rng);
    std::bernoulli_distribution coin(prm.p);
    for (int s = 0; s < prm.B; ++s) {
        std::set<std::pair<int, int>> edges;
        if (s == tree_slot)
            for (auto [a, b] : tree) edges.insert({std::min(a, b), std::max(a, b)});
        for (int a = 0; a < prm.n; ++a)
            for (int b = a + 1; b < prm.n; ++b)
                if (coin(rng)) edges.insert({a, b});
        cache_.emplace(window * prm.B + s,
                       GraphSnapshot(prm.n, {edges.begin(), edges.end()}));
    }
    return cache_.at(t);
}

int GraphSequence::n() const { return frame(0).n(); }

int DelaySchedule::tau(int i, int j, int t) const {
    if (i == j) return t;
    int result = t;
    switch (policy) {
        case Policy::none: result = t; break;
        case Policy::fixed_lag: result = std::max(0, t - lag); break;
        case Policy::scripted:
            if (!tau_fn) throw GraphError("scripted delay schedule without tau_fn");
            result = tau_fn(i, j, t);
            break;
    }
    if (result > t) throw GraphError("delay schedule references the future");
    if (B && result < t - *B + 1 && result != 0)
        throw GraphError("delay schedule violates the bound B");
    return result;
}

DelaySchedule DelaySchedule::fixed_lag_schedule(int k, std::optional<int> B) {
    DelaySchedule d;
    d.policy = Policy::fixed_lag;
    d.lag = k;
    d.B = B;
    return d;
}

BConnectivityReport check_b_connectivity(const GraphSequence& seq, int B, int horizon) {
    if (B < 1 || horizon < B) throw GraphError("check_b_connectivity: bad B/horizon");
    BConnectivityReport rep;
    for (int k = 0; (k + 1) * B <= horizon; ++k) {
        std::vector<const GraphSnapshot*> window;
        for (int s = k * B; s < (k + 1) * B; ++s) window.push_back(&seq.frame(s));
        if (!GraphSnapshot::edge_union(window).connected()) {
            rep.ok = false;
            rep.first_bad_window = k;
            return rep;
        }
    }
    return rep;
}

GraphSnapshot line_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    return GraphSnapshot(n, e);
}

GraphSnapshot ring_graph(int n) {
    if (n < 3) throw GraphError("ring needs n >= 3");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    return GraphSnapshot(n, e);
}

GraphSnapshot labeled_ring(int n, int base_size) {
    if (base_size < 3 || n % base_size != 0)
        throw GraphError("labeled_ring: n must be a multiple of base_size >= 3");
    // Base label pattern around the cycle: 0,1,2,1,2,... ; the size-n ring
    // repeats the base pattern n/base_size times.
    auto label = [&](int e) {
        int r = e % base_size;
        if (r == 0) return 0;
        return r % 2 == 1 ? 1 : 2;
    };
    std::vector<std::pair<int, int>> edges;
    std::vector<std::map<int, int>> ports(n);
    for (int e = 0; e < n; ++e) {
        int a = e, b = (e + 1) % n;
        edges.push_back({std::min(a, b), std::max(a, b)});
        ports[a][b] = label(e);
        ports[b][a] = label(e);
    }
    return GraphSnapshot(n, edges, ports);
}

GraphSnapshot complete_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) e.push_back({a, b});
    return GraphSnapshot(n, e);
}

GraphSnapshot star_graph(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i < n; ++i) e.push_back({0, i});
    return GraphSnapshot(n, e);
}

GraphSnapshot dumbbell_graph(int n) {
    if (n < 9 || n % 3 != 0) throw GraphError("dumbbell: n must be a multiple of 3, >= 9");
    int m = n / 3;
    std::vector<std::pair<int, int>> e;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) e.push_back({a, b});  // left clique 0..m-1
    for (int i = m - 1; i + 1 < 2 * m + 1; ++i) e.push_back({i, i + 1});  // connecting path
    for (int a = 2 * m; a < n; ++a)
        for (int b = a + 1; b < n; ++b) e.push_back({a, b});  // right clique 2m..n-1
    return GraphSnapshot(n, e);
}

GraphSequence quantizer_adversary_sequence(int n) {
    if (n < 4 || n % 2 != 0) throw GraphError("quantizer adversary: n must be even, >= 4");
    std::vector<GraphSnapshot> frames;
    for (int r = 0; r < n / 2; ++r) {
        std::vector<std::pair<int, int>> e;
        int top = n / 2 + r;  // nodes 0..top form the round's complete subgraph
        for (int a = 0; a <= top; ++a)
            for (int b = a + 1; b <= top; ++b) e.push_back({a, b});
        frames.push_back(GraphSnapshot(n, e));
    }
    return GraphSequence::scripted(std::move(frames), RepeatPolicy::hold_last);
}

GraphSequence generate_sequence(const std::string& family,
                                const std::map<std::string, double>& params,
                                std::uint64_t seed) {
    auto geti = [&](const std::string& k, std::optional<int> dflt = std::nullopt) {
        auto it = params.find(k);
        if (it == params.end()) {
            if (dflt) return *dflt;
            throw GraphError("missing param: " + k);
        }
        return int(it->second);
    };
    if (family == "line") return GraphSequence::static_graph(line_graph(geti("n")));
    if (family == "ring") {
        int n = geti("n");
        int base = geti("base", n);
        return GraphSequence::static_graph(labeled_ring(n, base));
    }
    if (family == "complete") return GraphSequence::static_graph(complete_graph(geti("n")));
    if (family == "star") return GraphSequence::static_graph(star_graph(geti("n")));
    if (family == "dumbbell") return GraphSequence::static_graph(dumbbell_graph(geti("n")));
    if (family == "quantizer_adversary") return quantizer_adversary_sequence(geti("n"));
    if (family == "random_b_connected") {
        RandomBConnectedParams p;
        p.n = geti("n");
        p.B = geti("B", 1);
        auto it = params.find("p");
        p.p = it == params.end() ? 0.0 : it->second;
        p.seed = seed;
        return GraphSequence::random_b_connected(p);
    }
    if (family == "example1") {
        // The three-node scenario whose weight script lives with the linear
        // runner; the graph part is the union of the edges it ever uses.
        auto s = GraphSequence::static_graph(
            GraphSnapshot(3, {{0, 1}, {0, 2}, {1, 2}}));
        s.special = SpecialSequence::example1;
        return s;
    }
    if (family == "example2") {
        auto s = GraphSequence::static_graph(GraphSnapshot(2, {{0, 1}}));
        s.special = SpecialSequence::example2;
        return s;
    }
    throw GraphError("unknown family: " + family);
}

}  // namespace consensus
