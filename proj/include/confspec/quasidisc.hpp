#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "confspec/errors.hpp"
#include "confspec/powerseries.hpp"
#include "confspec/stability.hpp"

namespace confspec {

// Derived constants for a K-quasidisc: integrability exponents, the Smirnov
// dimension bound 1 + k^2 with k = (K-1)/(K+1), and the eigenvalue-stability
// constant M = [C(4(2K^2-1))]^2.
struct QuasidiscParams {
    double K = 1.0;
    double k = 0.0;
    double p_sup = std::numeric_limits<double>::infinity();    // 2K^2/(K^2-1)
    double p_chosen = std::numeric_limits<double>::infinity(); // (2K^2-1)/(K^2-1)
    double dim_bound = 1.0;                                    // 1 + k^2
    double M = 0.0;
    SobolevConstantEstimate cq;
};

inline QuasidiscParams quasidisc_params(double K, bool with_M = true, int cq_basis = 32,
                                        double cq_tol = 1e-10) {
    if (!(K >= 1.0)) throw InvalidParameter("quasidisc_params: K must be >= 1");
    QuasidiscParams qp;
    qp.K = K;
    qp.k = (K - 1.0) / (K + 1.0);
    if (K > 1.0) {
        qp.p_sup = 2.0 * K * K / (K * K - 1.0);
        qp.p_chosen = (2.0 * K * K - 1.0) / (K * K - 1.0);
    }
    qp.dim_bound = 1.0 + qp.k * qp.k;
    if (with_M) {
        qp.cq = estimate_cq(4.0 * (2.0 * K * K - 1.0), cq_basis, cq_tol);
        qp.M = qp.cq.value * qp.cq.value;
    }
    return qp;
}

// Closed polyline (first vertex not repeated at the end).
struct DiscreteJordanCurve {
    std::vector<std::array<double, 2>> vertices;
    std::vector<double> cumlen; // cumlen[i] = arc length from vertex 0 to vertex i
    double total_length = 0.0;

    explicit DiscreteJordanCurve(std::vector<std::array<double, 2>> pts)
        : vertices(std::move(pts)) {
        const std::size_t n = vertices.size();
        if (n < 8) throw InvalidParameter("DiscreteJordanCurve: need at least 8 vertices");
        if (n > 4096) throw InvalidParameter("DiscreteJordanCurve: at most 4096 vertices");
        cumlen.resize(n);
        cumlen[0] = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            const auto& a = vertices[i - 1];
            const auto& b = vertices[i % n];
            const double d = std::hypot(b[0] - a[0], b[1] - a[1]);
            if (d <= 0.0)
                throw InvalidParameter("DiscreteJordanCurve: repeated consecutive vertices");
            if (i < n)
                cumlen[i] = cumlen[i - 1] + d;
            else
                total_length = cumlen[n - 1] + d;
        }
    }

    std::size_t size() const { return vertices.size(); }
};

// Ahlfors 3-point diagnostic: max over vertex pairs (a,b) of
// diam(smaller arc) / |a-b|, the smaller arc measured by arc length (ties to
// the forward arc from a). Arc diameters are taken over the sampled vertices
// only, so the value is a lower bound refined by densification.
inline double ahlfors_constant(const DiscreteJordanCurve& curve) {
    const std::size_t n = curve.size();
    const double total = curve.total_length;
    const auto& v = curve.vertices;

    auto arclen = [&](std::size_t i, std::size_t j) { // forward arc i -> j (indices mod n)
        const double li = curve.cumlen[i % n];
        const double lj = curve.cumlen[j % n];
        return (j % n > i % n || j % n == i % n) ? lj - li : total - li + lj;
    };
    auto dist = [&](std::size_t a, std::size_t b) {
        return std::hypot(v[a % n][0] - v[b % n][0], v[a % n][1] - v[b % n][1]);
    };

    double best = 0.0;
    std::vector<std::size_t> arc;
    arc.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        arc.clear();
        arc.push_back(i);
        double diam = 0.0;
        // extend the forward arc while it is the smaller one (tie -> forward)
        for (std::size_t j = i + 1; j < i + n; ++j) {
            const double forward = arclen(i, j);
            if (forward > total - forward) break;
            // new diameter candidates: distances from the new vertex
            for (std::size_t t : arc) diam = std::max(diam, dist(t, j));
            arc.push_back(j % n);
            const double chord = dist(i, j);
            const bool adjacent = (j == i + 1) || (j == i + n - 1);
            if (chord < 1e-12) {
                if (!adjacent)
                    throw DegenerateCurve("ahlfors_constant: coincident non-adjacent vertices");
                continue;
            }
            best = std::max(best, diam / chord);
        }
    }
    return best;
}

// Numerical evidence for |phi'| in L^p just below / above the quasidisc
// integrability threshold p_sup(K) = 2K^2/(K^2-1): L^p seminorms on a
// refining grid ladder. Emits trends
// only, never a theorem claim.
struct IntegrabilityEvidence {
    double p_sup = 0.0;
    double p_below = 0.0, p_above = 0.0;
    std::vector<std::pair<int, int>> ladder; // (nr, ntheta)
    std::vector<double> norms_below, norms_above;
    std::vector<double> increments_below, increments_above; // N_k/N_{k-1} - 1
    bool stable_below = false;
    bool growing_above = false;
};

// The default ladder stays coarse on purpose: truncated series smooth out
// boundary singularities below a scale ~1/(4*terms), and Gauss-Legendre nodes
// approach the boundary quadratically in nr, so fine rungs sample the
// saturated regime where every norm converges.
inline IntegrabilityEvidence check_integrability(
    const PowerSeriesMap& map, double K_hypothesis,
    std::vector<std::pair<int, int>> ladder = {{8, 32}, {12, 48}, {16, 64}, {24, 96}}) {
    if (!(K_hypothesis > 1.0))
        throw InvalidParameter("check_integrability: K hypothesis must be > 1");
    if (ladder.size() < 2)
        throw InvalidParameter("check_integrability: ladder needs at least two rungs");

    IntegrabilityEvidence ev;
    const double K2 = K_hypothesis * K_hypothesis;
    ev.p_sup = 2.0 * K2 / (K2 - 1.0);
    ev.p_below = ev.p_sup * 0.875;
    ev.p_above = ev.p_sup * 1.125;
    ev.ladder = std::move(ladder);

    for (const auto& [nr, ntheta] : ev.ladder) {
        const QuadratureGrid g = build_grid(nr, ntheta);
        ev.norms_below.push_back(lp_seminorm(map, ev.p_below, g));
        ev.norms_above.push_back(lp_seminorm(map, ev.p_above, g));
    }
    for (std::size_t i = 1; i < ev.ladder.size(); ++i) {
        ev.increments_below.push_back(ev.norms_below[i] / ev.norms_below[i - 1] - 1.0);
        ev.increments_above.push_back(ev.norms_above[i] / ev.norms_above[i - 1] - 1.0);
    }
    const double db = std::fabs(ev.increments_below.back());
    const double da = ev.increments_above.back();
    ev.stable_below = db < 0.05;
    ev.growing_above = da > 0.05 && da > 2.0 * db;
    return ev;
}

} // namespace confspec
