#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "confspec/errors.hpp"
#include "confspec/pairwise.hpp"

namespace confspec {

using complexd = std::complex<double>;

// Gauss-Legendre nodes/weights on (-1,1), Newton iteration on the
// three-term recurrence (classical gauleg).
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    constexpr double eps = 1.0e-15;
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= eps) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

// Tensor rule on the unit disc: Gauss-Legendre in r on (0,1) with the area
// element r dr absorbed into the weights, uniform (periodic trapezoid) in theta.
// Node index = a*ntheta + b for radial index a and angular index b.
struct QuadratureGrid {
    int nr = 0;
    int ntheta = 0;
    std::vector<double> r;        // nr radial nodes, strictly inside (0,1)
    std::vector<double> rw;       // nr radial weights, gauss weight * r
    std::vector<double> theta;    // ntheta angles, 2*pi*j/ntheta
    std::vector<double> weights;  // nr*ntheta node weights

    std::size_t size() const { return weights.size(); }

    std::complex<double> node(int a, int b) const {
        return std::polar(r[a], theta[b]);
    }

    template <class F>
    std::vector<double> sample(F&& f) const {
        std::vector<double> v(size());
        for (int a = 0; a < nr; ++a)
            for (int b = 0; b < ntheta; ++b)
                v[static_cast<std::size_t>(a) * ntheta + b] = f(node(a, b));
        return v;
    }
};

inline QuadratureGrid build_grid(int nr, int ntheta) {
    if (nr < 4) throw InvalidParameter("build_grid: nr must be >= 4");
    if (ntheta < 8 || ntheta % 2 != 0)
        throw InvalidParameter("build_grid: ntheta must be even and >= 8");

    QuadratureGrid g;
    g.nr = nr;
    g.ntheta = ntheta;

    std::vector<double> x, w;
    gauss_legendre(nr, x, w);
    g.r.resize(nr);
    g.rw.resize(nr);
    for (int a = 0; a < nr; ++a) {
        g.r[a] = 0.5 * (x[a] + 1.0);   // map (-1,1) -> (0,1)
        g.rw[a] = 0.5 * w[a] * g.r[a]; // jacobian of the map times r
    }

    const double dtheta = 2.0 * std::numbers::pi / ntheta;
    g.theta.resize(ntheta);
    for (int b = 0; b < ntheta; ++b) g.theta[b] = dtheta * b;

    g.weights.resize(static_cast<std::size_t>(nr) * ntheta);
    for (int a = 0; a < nr; ++a)
        for (int b = 0; b < ntheta; ++b)
            g.weights[static_cast<std::size_t>(a) * ntheta + b] = g.rw[a] * dtheta;
    return g;
}

inline QuadratureGrid doubled(const QuadratureGrid& g) {
    return build_grid(2 * g.nr, 2 * g.ntheta);
}

inline double integrate(const QuadratureGrid& g, std::span<const double> values) {
    if (values.size() != g.size())
        throw InvalidParameter("integrate: value count does not match grid size");
    std::vector<double> buf(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) buf[i] = values[i] * g.weights[i];
    return pairwise_sum(buf);
}

template <class F>
double integrate_fn(const QuadratureGrid& g, F&& f) {
    std::vector<double> buf(g.size());
    for (int a = 0; a < g.nr; ++a)
        for (int b = 0; b < g.ntheta; ++b) {
            const std::size_t i = static_cast<std::size_t>(a) * g.ntheta + b;
            buf[i] = f(g.node(a, b)) * g.weights[i];
        }
    return pairwise_sum(buf);
}

} // namespace confspec
