#include "consensus/function_computation.hpp"

#include <algorithm>
#include <numeric>

namespace consensus {

DetectionSim::DetectionSim(const GraphSnapshot& graph, const std::vector<int>& x)
    : g(&graph) {
    if (int(x.size()) != graph.n()) throw RunError("detection: size mismatch");
    for (int v : x)
        if (v != 0 && v != 1) throw RunError("detection: inputs must be bits");
    z = x;
    sent = x;
}

void DetectionSim::step() {
    std::vector<int> nz = z;
    for (int i = 0; i < g->n(); ++i)
        for (int j : g->neighbors(i)) nz[i] |= sent[j];
    z = nz;
    sent = z;
}

std::vector<int> detect_one(const std::vector<int>& x, const GraphSnapshot& g, long horizon) {
    DetectionSim sim(g, x);
    for (long t = 0; t < horizon; ++t) sim.step();
    return sim.z;
}

long CompiledPredicate::score(long value) const {
    if (value < 0 || value >= long(beta.size()))
        throw RunError("predicate score: value outside alphabet");
    long q = 0;
    for (size_t k = 0; k < beta.size(); ++k) {
        bool match = long(k) == value;
        if (positive[k] ? match : !match) q += beta[k];
    }
    return q;
}

bool CompiledPredicate::decide(const IaOutput& out) const {
    if (out.singleton) return strict ? out.lo < q_star : out.lo <= q_star;
    // Mean lies strictly inside (lo, lo+1); with integer q_star both forms
    // reduce to lo + 1 <= q_star.
    return out.lo + 1 <= q_star;
}

bool CompiledPredicate::decide_exact(const Rat& mean_score) const {
    Rat qs(q_star);
    return strict ? mean_score < qs : mean_score <= qs;
}

CompiledPredicate compile_predicate(const LinearPredicate& p) {
    if (p.coeffs.empty()) throw RunError("predicate needs coefficients");
    // Clear denominators: multiply through by the lcm.
    mpz_class l = p.rhs.get_den();
    for (const Rat& c : p.coeffs) {
        mpz_class d = c.get_den();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
        l = l / g * d;
    }
    CompiledPredicate out;
    out.strict = p.strict;
    long shift = 0;
    out.beta.resize(p.coeffs.size());
    out.positive.resize(p.coeffs.size());
    for (size_t k = 0; k < p.coeffs.size(); ++k) {
        Rat scaled = p.coeffs[k] * Rat(l);
        long a = long(mpz_class(scaled.get_num()).get_si());
        out.positive[k] = a >= 0;
        out.beta[k] = a >= 0 ? a : -a;
        if (a < 0) shift += -a;
    }
    Rat rhs_scaled = p.rhs * Rat(l);
    out.q_star = long(mpz_class(rhs_scaled.get_num()).get_si()) + shift;
    out.k_q = std::accumulate(out.beta.begin(), out.beta.end(), 0L);
    return out;
}

bool predicate_truth(const LinearPredicate& p, const std::vector<Rat>& freqs) {
    if (freqs.size() != p.coeffs.size()) throw RunError("predicate_truth: size mismatch");
    Rat lhs(0);
    for (size_t k = 0; k < freqs.size(); ++k) lhs += p.coeffs[k] * freqs[k];
    return p.strict ? lhs < p.rhs : lhs <= p.rhs;
}

BoxEvaluation eval_frequency_function(const BoxFunction& f, const std::vector<long>& x0,
                                      const GraphSnapshot& g) {
    for (long v : x0)
        if (v < 0 || v > f.alphabet) throw RunError("box function: value outside alphabet");
    BoxEvaluation ev;
    int n = g.n();
    // One interval-averaging instance per predicate occurrence.
    struct Instance {
        CompiledPredicate compiled;
        IaRunResult run;
    };
    std::vector<std::vector<std::vector<Instance>>> inst(f.cases.size());
    for (size_t c = 0; c < f.cases.size(); ++c) {
        inst[c].resize(f.cases[c].any_of.size());
        for (size_t a = 0; a < f.cases[c].any_of.size(); ++a) {
            for (const auto& pred : f.cases[c].any_of[a]) {
                if (long(pred.coeffs.size()) != f.alphabet + 1)
                    throw RunError("box function: predicate arity mismatch");
                Instance in;
                in.compiled = compile_predicate(pred);
                std::vector<long> q(n);
                for (int i = 0; i < n; ++i) q[i] = in.compiled.score(x0[i]);
                in.run = run_interval_averaging(q, g, in.compiled.k_q);
                if (!in.run.settled || !in.run.outputs_agree) ev.settled = false;
                inst[c][a].push_back(std::move(in));
            }
        }
    }
    ev.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        std::optional<std::string> label;
        int fired = 0;
        for (size_t c = 0; c < f.cases.size(); ++c) {
            bool case_holds = false;
            for (const auto& conj : inst[c]) {
                bool all = true;
                for (const auto& in : conj)
                    all = all && in.compiled.decide(in.run.outputs[i]);
                if (all) {
                    case_holds = true;
                    break;
                }
            }
            if (case_holds) {
                ++fired;
                label = f.cases[c].label;
            }
        }
        if (fired != 1) ev.consistent = false;
        ev.labels[i] = label ? *label : std::string();
    }
    for (int i = 1; i < n; ++i)
        if (ev.labels[i] != ev.labels[0]) ev.agree = false;
    return ev;
}

ExactFrequencyResult exact_frequency(const std::vector<int>& x, const GraphSnapshot& g,
                                     long budget) {
    for (int v : x)
        if (v != 0 && v != 1) throw RunError("exact_frequency: inputs must be bits");
    ExactFrequencyResult res;
    for (long m = 1; m <= budget; ++m) {
        std::vector<long> q(x.size());
        for (size_t i = 0; i < x.size(); ++i) q[i] = x[i] ? m : 0;
        auto run = run_interval_averaging(q, g, m);
        if (!run.settled || !run.outputs_agree) return res;  // unsettled
        if (run.outputs[0].singleton) {
            res.settled = true;
            res.m_star = m;
            res.p1 = ratio(run.outputs[0].lo, m);
            return res;
        }
    }
    return res;
}

namespace {

template <class Sim>
bool ring_equivalent(Sim& small, Sim& big, int n, int m, long horizon) {
    for (long t = 0; t <= horizon; ++t) {
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < m; ++r)
                if (!small.node_equal(big, j, j + r * n)) return false;
        small.step();
        big.step();
    }
    return true;
}

}  // namespace

bool ring_equivalence_detection(const std::vector<int>& x, int m, long horizon) {
    int n = int(x.size());
    auto gs = labeled_ring(n, n);
    auto gb = labeled_ring(n * m, n);
    std::vector<int> xb(size_t(n) * m);
    for (int r = 0; r < m; ++r)
        std::copy(x.begin(), x.end(), xb.begin() + size_t(r) * n);
    DetectionSim small(gs, x), big(gb, xb);
    return ring_equivalent(small, big, n, m, horizon);
}

bool ring_equivalence_interval(const std::vector<long>& x, long K, int m, long horizon) {
    int n = int(x.size());
    auto gs = labeled_ring(n, n);
    auto gb = labeled_ring(n * m, n);
    std::vector<long> xb(size_t(n) * m);
    for (int r = 0; r < m; ++r)
        std::copy(x.begin(), x.end(), xb.begin() + size_t(r) * n);
    IaSim small(gs, x, K), big(gb, xb, K);
    for (long t = 0; t <= horizon; ++t) {
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < m; ++r)
                if (!(small.state(j) == big.state(j + r * n))) return false;
        small.step();
        big.step();
    }
    return true;
}

}  // namespace consensus
