#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "consensus/rational.hpp"

namespace consensus {

template <class T>
T vec_sum(const std::vector<T>& x) {
    T s(0);
    for (const T& v : x) s += v;
    return s;
}

template <class T>
T vec_mean(const std::vector<T>& x) {
    if (x.empty()) throw std::invalid_argument("mean of empty vector");
    return vec_sum(x) / T(long(x.size()));
}

// Sample variance about the mean: V(x) = sum (x_i - mean)^2.
template <class T>
T variance_mean(const std::vector<T>& x) {
    T m = vec_mean(x);
    T s(0);
    for (const T& v : x) s += (v - m) * (v - m);
    return s;
}

// Floor variance: underline-V(x) = sum (x_i - min)^2.
template <class T>
T variance_min(const std::vector<T>& x) {
    T m = *std::min_element(x.begin(), x.end());
    T s(0);
    for (const T& v : x) s += (v - m) * (v - m);
    return s;
}

template <class T>
T vec_min(const std::vector<T>& x) {
    return *std::min_element(x.begin(), x.end());
}

template <class T>
T vec_max(const std::vector<T>& x) {
    return *std::max_element(x.begin(), x.end());
}

template <class T>
T spread(const std::vector<T>& x) {
    return vec_max(x) - vec_min(x);
}

}  // namespace consensus
