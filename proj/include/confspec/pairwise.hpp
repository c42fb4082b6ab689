#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace confspec {

// Fixed-order pairwise (cascade) summation. The reduction tree depends only
// on the element order, so results are bit-identical for identical inputs
// regardless of how callers parallelize the production of the values.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(std::span<const double> v) {
    return pairwise_sum(v.data(), v.size());
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

} // namespace confspec
