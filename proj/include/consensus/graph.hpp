#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace consensus {

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One undirected communication snapshot. Nodes are 0-indexed; self-loops are
// implicit and never stored. Each node optionally carries a port labeling: a
// map neighbor -> port number where ports are distinct integers <= degree
// (auto-assigned 0..d-1 by ascending neighbor index when not given).
class GraphSnapshot {
  public:
    GraphSnapshot() : n_(0) {}
    GraphSnapshot(int n, std::vector<std::pair<int, int>> edges,
                  std::optional<std::vector<std::map<int, int>>> ports = std::nullopt);

    int n() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int i) const { return adj_[i]; }
    int degree(int i) const { return int(adj_[i].size()); }
    int max_degree() const;
    bool has_edge(int i, int j) const;

    int port_of(int i, int j) const;        // port under which i sees neighbor j
    int neighbor_at_port(int i, int p) const;  // inverse; -1 if no such port
    bool edge_labeled() const;              // port_i(j) == port_j(i) for all edges

    bool connected() const;  // single node counts as connected
    // Union of edge sets; all snapshots must share n.
    static GraphSnapshot edge_union(const std::vector<const GraphSnapshot*>& gs);

  private:
    int n_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::map<int, int>> port_;      // neighbor -> port
    std::vector<std::map<int, int>> port_inv_;  // port -> neighbor
};

GraphSnapshot build_snapshot(int n, const std::vector<std::pair<int, int>>& edges,
                             std::optional<std::vector<std::map<int, int>>> ports = std::nullopt);

enum class RepeatPolicy { cycle, hold_last };

// Parameters of the seeded B-connected generator: within each window of B
// frames, one uniformly chosen frame receives a uniformly random spanning
// tree; every other (frame, edge) slot is filled by an independent
// Bernoulli(p) coin. Fully determined by the seed.
struct RandomBConnectedParams {
    int n = 0;
    int B = 1;
    double p = 0.0;
    std::uint64_t seed = 0;
};

// Tags for sequences whose weight/delay scripts live in linear_averaging.
enum class SpecialSequence { none, example1, example2 };

// A time-indexed sequence of snapshots: scripted frames with a repeat policy,
// or the seeded random B-connected generator.
class GraphSequence {
  public:
    GraphSequence() = default;
    static GraphSequence scripted(std::vector<GraphSnapshot> frames,
                                  RepeatPolicy repeat = RepeatPolicy::cycle);
    static GraphSequence static_graph(GraphSnapshot g);
    static GraphSequence random_b_connected(const RandomBConnectedParams& params);

    const GraphSnapshot& frame(int t) const;
    int n() const;
    std::optional<int> claimed_B() const { return B_; }
    void set_claimed_B(int B) { B_ = B; }
    bool is_static() const { return !rng_ && frames_.size() == 1; }
    SpecialSequence special = SpecialSequence::none;

  private:
    std::vector<GraphSnapshot> frames_;
    RepeatPolicy repeat_ = RepeatPolicy::cycle;
    std::optional<RandomBConnectedParams> rng_;
    std::optional<int> B_;
    mutable std::map<int, GraphSnapshot> cache_;  // generated windows
};

// Bounded communication delays tau(i, j, t): the age of j's value used by i at
// time t. policy none => tau = t; fixed_lag(k) => tau = max(0, t-k) for j != i;
// scripted => user table, validated against the bound when B is given.
struct DelaySchedule {
    enum class Policy { none, fixed_lag, scripted };
    Policy policy = Policy::none;
    int lag = 0;
    std::optional<int> B;  // bound: tau >= t-B+1
    // scripted: tau_fn(i, j, t) -> t'
    std::function<int(int, int, int)> tau_fn;

    int tau(int i, int j, int t) const;
    static DelaySchedule none_schedule() { return DelaySchedule{}; }
    static DelaySchedule fixed_lag_schedule(int k, std::optional<int> B = std::nullopt);
};

struct BConnectivityReport {
    bool ok = true;
    std::optional<int> first_bad_window;
};

// Checks that the union of edges over every window [kB, (k+1)B-1] inside the
// horizon is connected.
BConnectivityReport check_b_connectivity(const GraphSequence& seq, int B, int horizon);

// Named families.
GraphSnapshot line_graph(int n);
GraphSnapshot ring_graph(int n);
// Ring with the repetition-lemma edge labels 0,1,2,1,2,... (pattern of the
// base size repeated m times when n = m * base).
GraphSnapshot labeled_ring(int n, int base_size);
GraphSnapshot complete_graph(int n);
GraphSnapshot star_graph(int n);  // center 0
GraphSnapshot dumbbell_graph(int n);  // n divisible by 3: clique + path + clique

// Fig.-ic adversary script for even n: round r carries a complete graph over
// nodes {0..n/2+r} with everyone else isolated, for r = 0..n/2-1.
GraphSequence quantizer_adversary_sequence(int n);

GraphSequence generate_sequence(const std::string& family,
                                const std::map<std::string, double>& params,
                                std::uint64_t seed = 0);

}  // namespace consensus
