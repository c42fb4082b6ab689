#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "confspec/errors.hpp"

namespace confspec {

inline double bessel_j(int m, double x) {
    return std::cyl_bessel_j(static_cast<double>(m), x);
}

// d/dx J_m(x)
inline double bessel_j_prime(int m, double x) {
    if (m == 0) return -bessel_j(1, x);
    return bessel_j(m - 1, x) - m / x * bessel_j(m, x);
}

namespace detail {

// Safeguarded Newton inside a sign-changing bracket.
inline double refine_bessel_zero(int m, double lo, double hi) {
    double flo = bessel_j(m, lo);
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = bessel_j(m, x);
        const double fp = bessel_j_prime(m, x);
        double step = (fp != 0.0) ? f / fp : 0.0;
        double xn = x - step;
        if (!(xn > lo && xn < hi) || step == 0.0) {
            // Newton left the bracket, bisect instead.
            if ((f > 0.0) == (flo > 0.0)) {
                lo = x;
                flo = f;
            } else {
                hi = x;
            }
            xn = 0.5 * (lo + hi);
        } else {
            if ((f > 0.0) == (flo > 0.0)) {
                lo = x;
                flo = f;
            } else {
                hi = x;
            }
        }
        if (std::fabs(xn - x) <= 1e-15 * xn) return xn;
        x = xn;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return x;
}

} // namespace detail

// Table of the first k_max positive zeros j_{m,k} for m = 0..m_max.
// Row 0 starts from McMahon asymptotics; higher rows use the interlacing
// j_{m-1,k} < j_{m,k} < j_{m-1,k+1}, so row m-1 is computed one zero longer.
inline std::vector<std::vector<double>> bessel_zero_table(int m_max, int k_max) {
    if (m_max < 0 || m_max > 64) throw InvalidParameter("bessel_zero_table: need 0 <= m_max <= 64");
    if (k_max < 1 || k_max > 64) throw InvalidParameter("bessel_zero_table: need 1 <= k_max <= 64");

    std::vector<std::vector<double>> table(m_max + 1);
    const int extra = m_max; // row m needs k_max + (m_max - m) zeros
    {
        std::vector<double>& row = table[0];
        row.resize(k_max + extra);
        for (int k = 1; k <= k_max + extra; ++k) {
            const double beta = (k - 0.25) * std::numbers::pi;
            const double guess = beta + 1.0 / (8.0 * beta);
            double lo = guess - 0.5, hi = guess + 0.5;
            // Widen until a sign change is bracketed.
            for (int t = 0; t < 20 && (bessel_j(0, lo) > 0.0) == (bessel_j(0, hi) > 0.0); ++t) {
                lo -= 0.25;
                hi += 0.25;
            }
            if (lo <= 0.0) lo = 1e-8;
            if ((bessel_j(0, lo) > 0.0) == (bessel_j(0, hi) > 0.0))
                throw ConvergenceFailure("bessel_zero_table: failed to bracket zero of J_0");
            row[k - 1] = detail::refine_bessel_zero(0, lo, hi);
        }
    }
    for (int m = 1; m <= m_max; ++m) {
        const int count = k_max + extra - m;
        std::vector<double>& row = table[m];
        const std::vector<double>& prev = table[m - 1];
        row.resize(count);
        for (int k = 1; k <= count; ++k) {
            const double lo = prev[k - 1], hi = prev[k];
            if ((bessel_j(m, lo) > 0.0) == (bessel_j(m, hi) > 0.0))
                throw ConvergenceFailure("bessel_zero_table: interlacing bracket has no sign change");
            row[k - 1] = detail::refine_bessel_zero(m, lo, hi);
        }
    }
    for (auto& row : table) row.resize(k_max);
    return table;
}

// k-th positive zero of J_m, accurate to ~1e-13 absolute.
inline double bessel_zero(int m, int k) {
    if (m < 0 || m > 64 || k < 1 || k > 64)
        throw InvalidParameter("bessel_zero: need 0 <= m <= 64, 1 <= k <= 64");
    return bessel_zero_table(m, k)[m][k - 1];
}

} // namespace confspec
