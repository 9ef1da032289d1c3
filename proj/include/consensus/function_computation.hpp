#pragma once

#include <optional>
#include <string>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/interval_averaging.hpp"
#include "consensus/rational.hpp"

namespace consensus {

// --- Detection: anonymous OR-propagation. All outputs become max(x) within
// diameter rounds; per-node state is a single bit.
struct DetectionSim {
    const GraphSnapshot* g;
    std::vector<int> z;        // current OR
    std::vector<int> sent;     // bit in flight from each node

    DetectionSim(const GraphSnapshot& graph, const std::vector<int>& x);
    void step();
    int output(int i) const { return z[i]; }
    bool node_equal(const DetectionSim& o, int i, int j) const {
        return z[i] == o.z[j] && sent[i] == o.sent[j];
    }
};

std::vector<int> detect_one(const std::vector<int>& x, const GraphSnapshot& g, long horizon);

// --- Rational linear inequalities over value frequencies, compiled to
// integer per-node scores for interval averaging.
struct LinearPredicate {
    std::vector<Rat> coeffs;  // alpha_0..alpha_K over the alphabet {0..K}
    Rat rhs;
    bool strict = false;
};

struct CompiledPredicate {
    std::vector<long> beta;       // nonnegative, index 0..K
    std::vector<bool> positive;   // k in P (cleared coefficient >= 0)
    long q_star = 0;
    long k_q = 0;  // alphabet bound for the score: sum of beta
    bool strict = false;

    long score(long value) const;  // q_i for a node holding `value`
    // Decides the predicate from the interval-averaging output on the scores.
    bool decide(const IaOutput& out) const;
    // Reference decision straight from frequencies (oracle path).
    bool decide_exact(const Rat& mean_score) const;
};

CompiledPredicate compile_predicate(const LinearPredicate& p);

// Evaluates the original inequality on a frequency vector (p_0..p_K), for
// identity checks against the compiled form.
bool predicate_truth(const LinearPredicate& p, const std::vector<Rat>& freqs);

// --- Box functions: labels with level sets that are unions of intersections
// of linear predicates.
struct BoxFunction {
    long alphabet = 1;  // values 0..alphabet
    struct Case {
        std::string label;
        std::vector<std::vector<LinearPredicate>> any_of;  // union of all_of lists
    };
    std::vector<Case> cases;
};

struct BoxEvaluation {
    std::vector<std::string> labels;  // per node
    bool consistent = true;  // exactly one case fired at every node
    bool agree = true;       // all nodes produced the same label
    bool settled = true;
};

// Runs one interval-averaging instance per predicate occurrence (in lockstep
// semantics; the instances do not interact) and combines per node.
BoxEvaluation eval_frequency_function(const BoxFunction& f, const std::vector<long>& x0,
                                      const GraphSnapshot& g);

// --- Exact frequency of ones with unbounded memory: machines Q_m run
// interval averaging on inputs m*x_i with alphabet {0..m}; the smallest m
// whose output is a singleton gives p_1 = y/m exactly.
struct ExactFrequencyResult {
    bool settled = false;
    long m_star = 0;
    std::optional<Rat> p1;
};

ExactFrequencyResult exact_frequency(const std::vector<int>& x, const GraphSnapshot& g,
                                     long budget);

// --- Ring self-concatenation equivalence: node j of the size-n labeled ring
// and nodes j, j+n, ... of the size-mn ring (same label pattern repeated)
// stay in identical states forever.
bool ring_equivalence_detection(const std::vector<int>& x, int m, long horizon);
bool ring_equivalence_interval(const std::vector<long>& x, long K, int m, long horizon);

}  // namespace consensus
