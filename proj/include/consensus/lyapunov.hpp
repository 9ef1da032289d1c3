#pragma once

#include <optional>
#include <set>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/linear.hpp"
#include "consensus/metrics.hpp"
#include "consensus/weights.hpp"

namespace consensus {

enum class VarianceMode { mean, min };

template <class T>
T variance(const std::vector<T>& x, VarianceMode mode) {
    return mode == VarianceMode::mean ? variance_mean(x) : variance_min(x);
}

// Both sides of the one-step variance decomposition
//   V(x) - V(Ax) = sum_{i<j} w_ij (x_i - x_j)^2,   w = A^T A,
// computed by independent paths.
template <class T>
struct VarianceDecomposition {
    T direct_drop;
    T sum_form;
    Matrix<T> w;
    bool equal;
};

template <class T>
VarianceDecomposition<T> variance_decomposition(const Matrix<T>& a, const std::vector<T>& x) {
    if (!a.doubly_stochastic())
        throw std::invalid_argument("variance decomposition needs a doubly stochastic matrix");
    VarianceDecomposition<T> d{T(0), T(0), a.transpose_times_self(), false};
    d.direct_drop = variance_mean(x) - variance_mean(a.apply(x));
    for (int i = 0; i < a.n; ++i)
        for (int j = i + 1; j < a.n; ++j)
            d.sum_form += d.w(i, j) * (x[i] - x[j]) * (x[i] - x[j]);
    if constexpr (scalar_traits<T>::exact)
        d.equal = d.direct_drop == d.sum_form;
    else
        d.equal = std::abs(to_double(d.direct_drop) - to_double(d.sum_form)) <=
                  1e-12 * (1.0 + std::abs(to_double(d.direct_drop)));
    return d;
}

// Total A^T A weight crossing the cut (S, complement); whenever positive it
// is at least eta/2 for matrices with positive diagonal and positive entries
// >= eta.
template <class T>
struct CutWeight {
    T value;
    bool bound_holds;  // value == 0 or value >= eta/2
};

template <class T>
CutWeight<T> cut_weight(const Matrix<T>& a, const std::set<int>& s, const T& eta) {
    if (s.empty() || int(s.size()) == a.n)
        throw std::invalid_argument("cut_weight: cut must be proper and nonempty");
    Matrix<T> w = a.transpose_times_self();
    T total(0);
    for (int i : s)
        for (int j = 0; j < a.n; ++j)
            if (!s.count(j)) total += w(i, j);
    CutWeight<T> out{total, true};
    if (total > T(0)) out.bound_holds = !(total < eta / T(2));
    return out;
}

struct WindowReport {
    struct Window {
        long index = 0;
        double v_start = 0, v_end = 0;
        double relative_drop = 0;          // (V(tB) - V((t+1)B)) / V(tB)
        double sorted_gap_bound = 0;       // (eta/2) * sum of squared sorted gaps
        bool skipped = false;              // V(tB) == 0
        bool relative_ok = true;           // relative_drop >= eta/(2 n^2)
        bool gap_ok = true;                // absolute drop >= sorted_gap_bound
    };
    std::vector<Window> windows;
    bool ok = true;
};

// Per-window decrease audit for doubly stochastic runs: relative variance
// drop >= eta/(2 n^2) and absolute drop >= (eta/2) * sum of squared gaps of
// the sorted start-of-window state.
template <class T>
WindowReport window_decrease_check(const RunRecord<T>& rec, int B, double eta,
                                   double tol = 1e-9) {
    if (rec.states.empty()) throw std::invalid_argument("record lacks per-step states");
    WindowReport rep;
    int n = rec.n;
    long windows = (long(rec.states.size()) - 1) / B;
    for (long k = 0; k < windows; ++k) {
        const auto& xs = rec.states[size_t(k * B)];
        const auto& xe = rec.states[size_t((k + 1) * B)];
        typename WindowReport::Window w;
        w.index = k;
        w.v_start = to_double(variance_mean(xs));
        w.v_end = to_double(variance_mean(xe));
        if (w.v_start <= 0) {
            w.skipped = true;
            rep.windows.push_back(w);
            continue;
        }
        double drop = w.v_start - w.v_end;
        w.relative_drop = drop / w.v_start;
        std::vector<double> sorted;
        sorted.reserve(n);
        for (const auto& v : xs) sorted.push_back(to_double(v));
        std::sort(sorted.begin(), sorted.end());
        double gaps = 0;
        for (int i = 0; i + 1 < n; ++i)
            gaps += (sorted[i + 1] - sorted[i]) * (sorted[i + 1] - sorted[i]);
        w.sorted_gap_bound = eta / 2 * gaps;
        w.relative_ok = w.relative_drop >= eta / (2.0 * n * n) * (1 - tol) - tol;
        w.gap_ok = drop >= w.sorted_gap_bound * (1 - tol) - tol;
        if (!w.relative_ok || !w.gap_ok) rep.ok = false;
        rep.windows.push_back(w);
    }
    return rep;
}

struct SpectralReport {
    int n = 0;
    std::vector<double> eigenvalues;  // sorted descending by value
    double lambda2 = 0;               // second-largest by value
    double bound = 0;                 // 1 - 6/n^2
    bool in_interval = false;         // lambda2 in (bound, 1)
};

// Requires: symmetric tridiagonal doubly stochastic with connected support,
// n >= 3. Throws std::invalid_argument otherwise.
SpectralReport spectral_gap(const Matrix<double>& a, double tol = 1e-9);

struct FixedMatrixLyapunov {
    Matrix<double> m;            // H^T D H
    double pi_residual = 0;      // max |pi^T A - pi^T|
    double m_one_norm = 0;       // max |(M 1)_i|
    double min_eig_m = 0;        // smallest eigenvalue of M
    double min_eig_drop = 0;     // smallest eigenvalue of M - A^T M A
    int rank = 0;
    bool valid = false;          // all checks pass (PSD to 1e-10 etc.)
};

FixedMatrixLyapunov fixed_matrix_lyapunov(const Matrix<double>& a,
                                          const std::vector<double>& pi,
                                          double tol = 1e-8);

struct AppendixACounterexample {
    GraphSnapshot graph;
    std::vector<Rat> x, y;
    Rat v_x, v_y;
    Rat eight_term_sum;  // sum over the 8 nodes of (y_i - mean(y))^2
};

// The 8-node tree on which one equal-neighbor step increases the sample
// variance: V(x) = 80 exactly, V(y) > 80.
AppendixACounterexample appendix_a_counterexample();

enum class Measure { V, underlineV, spread };

// Smallest recorded step t with measure(t) <= eps * measure(0), staying below
// for the rest of the record; nullopt when never reached within the record.
std::optional<long> convergence_time(const std::vector<MetricRow>& rows, double eps,
                                     Measure measure);

template <class T>
std::optional<long> convergence_time(const RunRecord<T>& rec, double eps, Measure measure) {
    return convergence_time(rec.rows, eps, measure);
}

}  // namespace consensus
