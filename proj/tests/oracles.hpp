#pragma once

// Slow reference computations shared by unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ews/dataset.hpp"
#include "ews/tree.hpp"

namespace oracle {

// O(n^2) pair counting, ties count one half.
inline double pair_auc(const std::vector<int>& y, const std::vector<double>& s) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!y[i]) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j]) continue;
            den += 1;
            if (s[i] > s[j]) num += 1;
            if (s[i] == s[j]) num += 0.5;
        }
    }
    return num / den;
}

inline double split_score(double s1, double s2, double lambda) { return s2 + lambda > 0 ? s1 * s1 / (s2 + lambda) : 0.0; }

// Every (feature, midpoint) pair scored directly from the raw rows.
inline ews::tree::SplitChoice brute_force_split(const ews::Matrix& x, const std::vector<double>& s1,
                                                const std::vector<double>& s2, double lambda) {
    ews::tree::SplitChoice best;
    double t1 = 0, t2 = 0;
    for (std::size_t i = 0; i < s1.size(); ++i) {
        t1 += s1[i];
        t2 += s2[i];
    }
    const double parent = split_score(t1, t2, lambda);
    best.gain = 1e-12 * (1 + parent);
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < x.rows(); ++i) vals.push_back(x(i, f));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
            const double thr = 0.5 * (vals[k] + vals[k + 1]);
            double l1 = 0, l2 = 0;
            for (std::size_t i = 0; i < x.rows(); ++i) {
                if (x(i, f) <= thr) {
                    l1 += s1[i];
                    l2 += s2[i];
                }
            }
            const double gain = split_score(l1, l2, lambda) + split_score(t1 - l1, t2 - l2, lambda) - parent;
            if (gain > best.gain) best = {static_cast<int>(f), thr, gain};
        }
    }
    return best;
}

inline double shapley_weight(std::size_t s, std::size_t d) {
    // s! (d - s - 1)! / d!
    double w = 1.0 / static_cast<double>(d);
    for (std::size_t k = 1; k <= s; ++k) w *= static_cast<double>(k) / static_cast<double>(d - s + k - 1);
    return w;
}

// Tree value with features outside `mask` marginalized by recorded covers.
inline double path_value(const ews::tree::Tree& t, std::size_t node, std::span<const double> x, unsigned mask) {
    const auto& n = t.nodes[node];
    if (n.is_leaf()) return n.value;
    const auto f = static_cast<std::size_t>(n.feature);
    const auto l = static_cast<std::size_t>(n.left), r = static_cast<std::size_t>(n.right);
    if (mask & (1u << f)) return path_value(t, x[f] <= n.threshold ? l : r, x, mask);
    return (t.nodes[l].cover * path_value(t, l, x, mask) + t.nodes[r].cover * path_value(t, r, x, mask)) / n.cover;
}

// Shapley values by enumerating all 2^d coalitions of the value function v(mask).
template <class Value>
std::vector<double> brute_shapley(std::size_t d, Value v) {
    std::vector<double> phi(d, 0.0);
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        const auto s = static_cast<std::size_t>(__builtin_popcount(mask));
        for (std::size_t j = 0; j < d; ++j) {
            if (mask & (1u << j)) continue;
            phi[j] += shapley_weight(s, d) * (v(mask | (1u << j)) - v(mask));
        }
    }
    return phi;
}

inline std::vector<double> column_means(const ews::Matrix& x) {
    std::vector<double> m(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) m[j] += x(i, j) / static_cast<double>(x.rows());
    }
    return m;
}

inline double rel_error(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Central difference of f along coordinate k.
template <class F>
double central_difference(F f, std::vector<double> theta, std::size_t k, double h = 1e-5) {
    theta[k] += h;
    const double plus = f(theta);
    theta[k] -= 2 * h;
    const double minus = f(theta);
    return (plus - minus) / (2 * h);
}

}  // namespace oracle
