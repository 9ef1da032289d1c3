#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "consensus/graph.hpp"
#include "consensus/rational.hpp"

namespace consensus {

struct WeightError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Small dense square matrix over either backend.
template <class T>
struct Matrix {
    int n = 0;
    std::vector<T> a;  // row-major

    Matrix() = default;
    explicit Matrix(int n_) : n(n_), a(size_t(n_) * n_, T(0)) {}
    T& operator()(int i, int j) { return a[size_t(i) * n + j]; }
    const T& operator()(int i, int j) const { return a[size_t(i) * n + j]; }

    static Matrix identity(int n_) {
        Matrix m(n_);
        for (int i = 0; i < n_; ++i) m(i, i) = T(1);
        return m;
    }

    std::vector<T> apply(const std::vector<T>& x) const {
        std::vector<T> y(n, T(0));
        for (int i = 0; i < n; ++i) {
            T acc(0);
            for (int j = 0; j < n; ++j)
                if (!(a[size_t(i) * n + j] == T(0))) acc += a[size_t(i) * n + j] * x[j];
            y[i] = acc;
        }
        return y;
    }

    Matrix transpose_times_self() const {  // A^T A
        Matrix w(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                T acc(0);
                for (int k = 0; k < n; ++k) acc += (*this)(k, i) * (*this)(k, j);
                w(i, j) = acc;
                if (j != i) w(j, i) = w(i, j);
            }
        return w;
    }

    bool row_stochastic() const {
        for (int i = 0; i < n; ++i) {
            T s(0);
            for (int j = 0; j < n; ++j) {
                if (a[size_t(i) * n + j] < T(0)) return false;
                s += a[size_t(i) * n + j];
            }
            if (!approx_one(s)) return false;
        }
        return true;
    }

    bool doubly_stochastic() const {
        if (!row_stochastic()) return false;
        for (int j = 0; j < n; ++j) {
            T s(0);
            for (int i = 0; i < n; ++i) s += a[size_t(i) * n + j];
            if (!approx_one(s)) return false;
        }
        return true;
    }

    bool symmetric() const {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (!((*this)(i, j) == (*this)(j, i))) return false;
        return true;
    }

    // Smallest positive entry; nullopt for the zero matrix.
    std::optional<T> min_positive_entry() const {
        std::optional<T> m;
        for (const T& v : a)
            if (v > T(0) && (!m || v < *m)) m = v;
        return m;
    }

  private:
    static bool approx_one(const T& s) {
        if constexpr (scalar_traits<T>::exact) {
            return s == T(1);
        } else {
            return std::abs(s - T(1)) <= 1e-9;
        }
    }
};

template <class T>
struct WeightMatrix {
    Matrix<T> a;
    T eta;  // smallest positive entry actually achieved
};

struct WeightScheme {
    enum class Kind { equal_neighbor, metropolis, max_degree, custom, load_balancing };
    Kind kind = Kind::metropolis;
    // max_degree: epsilon as a rational; unset means the omniscient default
    // 1/(max degree + 1) per snapshot.
    std::optional<Rat> epsilon;
    // custom: fixed matrix in exact rationals, validated per snapshot.
    std::optional<Matrix<Rat>> custom;

    bool doubly_stochastic_by_construction() const {
        return kind == Kind::metropolis || kind == Kind::max_degree ||
               kind == Kind::load_balancing;
    }
    static WeightScheme equal_neighbor() { return {Kind::equal_neighbor, {}, {}}; }
    static WeightScheme metropolis() { return {Kind::metropolis, {}, {}}; }
    static WeightScheme max_degree(std::optional<Rat> eps = std::nullopt) {
        return {Kind::max_degree, eps, {}};
    }
    static WeightScheme custom_matrix(Matrix<Rat> m) {
        return {Kind::custom, {}, std::move(m)};
    }
    static WeightScheme load_balancing() { return {Kind::load_balancing, {}, {}}; }
};

// Realizes the scheme on one snapshot. Self-loops are implicit: degrees used
// by the formulas include the node itself (equal neighbor row i is
// 1/(d_i + 1) over {i} and its neighbors; Metropolis off-diagonal entries are
// 1/max(d_i+1, d_j+1) with the diagonal absorbing the slack).
template <class T>
WeightMatrix<T> build_weights(const WeightScheme& scheme, const GraphSnapshot& g) {
    int n = g.n();
    Matrix<T> a(n);
    switch (scheme.kind) {
        case WeightScheme::Kind::equal_neighbor: {
            for (int i = 0; i < n; ++i) {
                T w = scalar_traits<T>::from_long_ratio(1, g.degree(i) + 1);
                a(i, i) = w;
                for (int j : g.neighbors(i)) a(i, j) = w;
            }
            break;
        }
        case WeightScheme::Kind::metropolis: {
            for (int i = 0; i < n; ++i) {
                T diag(1);
                for (int j : g.neighbors(i)) {
                    T w = scalar_traits<T>::from_long_ratio(
                        1, std::max(g.degree(i), g.degree(j)) + 1);
                    a(i, j) = w;
                    diag -= w;
                }
                a(i, i) = diag;
            }
            break;
        }
        case WeightScheme::Kind::max_degree: {
            Rat eps = scheme.epsilon ? *scheme.epsilon : ratio(1, g.max_degree() + 1);
            if (eps <= 0 || eps > ratio(1, g.max_degree() + 1))
                throw WeightError("max_degree: epsilon must be in (0, 1/(d_max+1)]");
            T e = scalar_traits<T>::from_rat(eps);
            for (int i = 0; i < n; ++i) {
                a(i, i) = T(1) - e * T(g.degree(i));
                for (int j : g.neighbors(i)) a(i, j) = e;
            }
            break;
        }
        case WeightScheme::Kind::custom: {
            const Matrix<Rat>& m = *scheme.custom;
            if (m.n != n) throw WeightError("custom matrix: size mismatch");
            for (int i = 0; i < n; ++i) {
                Rat row(0);
                if (m(i, i) <= 0) throw WeightError("custom matrix: nonpositive diagonal");
                for (int j = 0; j < n; ++j) {
                    if (m(i, j) < 0) throw WeightError("custom matrix: negative entry");
                    if (m(i, j) > 0 && i != j && !g.has_edge(i, j))
                        throw WeightError("custom matrix: weight on a non-edge");
                    row += m(i, j);
                    a(i, j) = scalar_traits<T>::from_rat(m(i, j));
                }
                if (row != 1) throw WeightError("custom matrix: row sum != 1");
            }
            break;
        }
        case WeightScheme::Kind::load_balancing:
            throw WeightError("load balancing weights depend on x; use lb_round");
    }
    auto eta = a.min_positive_entry();
    return {std::move(a), eta ? *eta : T(1)};
}

}  // namespace consensus
