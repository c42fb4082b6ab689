#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "confspec/bessel.hpp"
#include "confspec/errors.hpp"
#include "confspec/pairwise.hpp"
#include "confspec/quadrature.hpp"

namespace confspec {

// One Dirichlet eigenfunction of the unit disc:
//   psi(r,theta) = norm * J_m(j_mk r) * {cos,sin}(m theta),
// with Dirichlet eigenvalue mu = j_mk^2. Exactly zero on |z| = 1.
struct BasisMode {
    int m = 0;
    int k = 1;
    int parity = 0; // 0 = cos, 1 = sin (m = 0 has cos only)
    double root = 0.0;
    double mu = 0.0;
    double norm = 0.0;
};

struct DiscBasis {
    int m_max = 0;
    int k_max = 0;
    std::vector<BasisMode> modes; // ordered by mu ascending, ties by (m, parity, k)

    int size() const { return static_cast<int>(modes.size()); }
};

// All modes with m <= m_max, k <= k_max, both parities for m >= 1.
// Size (2 m_max + 1) * k_max.
inline DiscBasis build_basis(int m_max, int k_max) {
    if (m_max < 0) throw InvalidParameter("build_basis: m_max must be >= 0");
    if (k_max < 1) throw InvalidParameter("build_basis: k_max must be >= 1");
    const auto zeros = bessel_zero_table(m_max, k_max);

    DiscBasis basis;
    basis.m_max = m_max;
    basis.k_max = k_max;
    for (int m = 0; m <= m_max; ++m)
        for (int k = 1; k <= k_max; ++k) {
            const double j = zeros[m][k - 1];
            // L2 normalization: int_0^1 J_m(j r)^2 r dr = J_{m+1}(j)^2 / 2,
            // angular integral 2*pi (m = 0) or pi (m >= 1).
            const double tail = std::fabs(bessel_j(m + 1, j));
            const double norm = (m == 0)
                                    ? 1.0 / (std::sqrt(std::numbers::pi) * tail)
                                    : std::numbers::sqrt2 / (std::sqrt(std::numbers::pi) * tail);
            const int parities = (m == 0) ? 1 : 2;
            for (int par = 0; par < parities; ++par)
                basis.modes.push_back({m, k, par, j, j * j, norm});
        }
    std::stable_sort(basis.modes.begin(), basis.modes.end(),
                     [](const BasisMode& a, const BasisMode& b) {
                         if (a.mu != b.mu) return a.mu < b.mu;
                         return std::tie(a.m, a.parity, a.k) < std::tie(b.m, b.parity, b.k);
                     });
    return basis;
}

// Radial factor of every mode at every radial grid node, norm included.
inline std::vector<std::vector<double>> radial_values(const DiscBasis& basis,
                                                      const QuadratureGrid& g) {
    std::vector<std::vector<double>> R(basis.modes.size());
    for (std::size_t i = 0; i < basis.modes.size(); ++i) {
        const BasisMode& mode = basis.modes[i];
        if (mode.parity == 1 && i > 0 && basis.modes[i - 1].m == mode.m &&
            basis.modes[i - 1].k == mode.k && basis.modes[i - 1].parity == 0) {
            R[i] = R[i - 1]; // cos/sin pair shares the radial profile
            continue;
        }
        R[i].resize(g.nr);
        for (int a = 0; a < g.nr; ++a)
            R[i][a] = mode.norm * bessel_j(mode.m, mode.root * g.r[a]);
    }
    return R;
}

// True when ntheta comfortably resolves the angular content of the weight
// (bandwidth = highest angular harmonic of h; 2(N-1) for a degree-N series).
inline bool angular_bandwidth_ok(const DiscBasis& basis, int weight_bandwidth,
                                 const QuadratureGrid& g) {
    return g.ntheta > 2 * (2 * basis.m_max + weight_bandwidth);
}

struct MassMatrix {
    Eigen::MatrixXd M;
    bool bandwidth_warning = false;
};

// Weighted mass matrix M_ij = \iint h psi_i psi_j over the disc, evaluated on
// the tensor grid. The angular sums are reorganized through ring Fourier
// sums C_d, S_d of the weight, which equals the direct per-entry node sum in
// exact arithmetic (product-to-sum identities hold pointwise) but costs
// O(nr * size^2) instead of O(nr * ntheta * size^2).
inline MassMatrix assemble_mass(const DiscBasis& basis, const std::vector<double>& weight_values,
                                const QuadratureGrid& g, int weight_bandwidth = -1) {
    if (weight_values.size() != g.size())
        throw InvalidParameter("assemble_mass: weight values do not match grid");
    const int n = basis.size();
    const int dmax = 2 * basis.m_max;
    const double dtheta = 2.0 * std::numbers::pi / g.ntheta;

    // cos/sin lookup: cos(d * theta_b) = costab[(d*b) mod ntheta]
    std::vector<double> costab(g.ntheta), sintab(g.ntheta);
    for (int b = 0; b < g.ntheta; ++b) {
        costab[b] = std::cos(g.theta[b]);
        sintab[b] = std::sin(g.theta[b]);
    }

    // Ring transforms: C[d][a] = dtheta * sum_b h(r_a, theta_b) cos(d theta_b).
    std::vector<std::vector<double>> C(dmax + 1, std::vector<double>(g.nr));
    std::vector<std::vector<double>> S(dmax + 1, std::vector<double>(g.nr));
    std::vector<double> buf(g.ntheta);
    for (int d = 0; d <= dmax; ++d) {
        for (int a = 0; a < g.nr; ++a) {
            const double* h = weight_values.data() + static_cast<std::size_t>(a) * g.ntheta;
            for (int b = 0; b < g.ntheta; ++b)
                buf[b] = h[b] * costab[static_cast<std::size_t>(d) * b % g.ntheta];
            C[d][a] = dtheta * pairwise_sum(buf);
            for (int b = 0; b < g.ntheta; ++b)
                buf[b] = h[b] * sintab[static_cast<std::size_t>(d) * b % g.ntheta];
            S[d][a] = dtheta * pairwise_sum(buf);
        }
    }

    const auto R = radial_values(basis, g);

    MassMatrix out;
    out.M.resize(n, n);
    std::vector<double> rbuf(g.nr);
    for (int i = 0; i < n; ++i) {
        const BasisMode& mi = basis.modes[i];
        for (int j = i; j < n; ++j) {
            const BasisMode& mj = basis.modes[j];
            const int sum = mi.m + mj.m;
            const int dif = std::abs(mi.m - mj.m);
            for (int a = 0; a < g.nr; ++a) {
                double ang;
                if (mi.parity == 0 && mj.parity == 0)
                    ang = 0.5 * (C[dif][a] + C[sum][a]);
                else if (mi.parity == 1 && mj.parity == 1)
                    ang = 0.5 * (C[dif][a] - C[sum][a]);
                else {
                    // cos(m theta) sin(m' theta) with m the cos-mode order
                    const int mc = (mi.parity == 0) ? mi.m : mj.m;
                    const int ms = (mi.parity == 0) ? mj.m : mi.m;
                    ang = 0.5 * S[sum][a];
                    if (ms > mc)
                        ang += 0.5 * S[dif][a];
                    else if (ms < mc)
                        ang -= 0.5 * S[dif][a];
                }
                rbuf[a] = R[i][a] * R[j][a] * ang * g.rw[a];
            }
            out.M(i, j) = pairwise_sum(rbuf);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) out.M(i, j) = out.M(j, i);
    // symmetrize (no-op for this assembly, kept as the documented contract)
    out.M = 0.5 * (out.M + out.M.transpose()).eval();

    if (weight_bandwidth >= 0)
        out.bandwidth_warning = !angular_bandwidth_ok(basis, weight_bandwidth, g);
    return out;
}

// Direct per-entry quadrature of one mass-matrix entry; reference path for
// tests and small checks.
inline double mass_entry_direct(const DiscBasis& basis, int i, int j,
                                const std::vector<double>& weight_values,
                                const QuadratureGrid& g) {
    const BasisMode& mi = basis.modes[i];
    const BasisMode& mj = basis.modes[j];
    std::vector<double> buf(g.size());
    for (int a = 0; a < g.nr; ++a) {
        const double Ri = mi.norm * bessel_j(mi.m, mi.root * g.r[a]);
        const double Rj = mj.norm * bessel_j(mj.m, mj.root * g.r[a]);
        for (int b = 0; b < g.ntheta; ++b) {
            const std::size_t idx = static_cast<std::size_t>(a) * g.ntheta + b;
            const double ai = (mi.parity == 0) ? std::cos(mi.m * g.theta[b]) : std::sin(mi.m * g.theta[b]);
            const double aj = (mj.parity == 0) ? std::cos(mj.m * g.theta[b]) : std::sin(mj.m * g.theta[b]);
            buf[idx] = weight_values[idx] * Ri * ai * Rj * aj * g.weights[idx];
        }
    }
    return pairwise_sum(buf);
}

struct Spectrum {
    std::vector<double> eigenvalues;    // ascending, strictly positive
    Eigen::MatrixXd coeffs;             // basis.size() x n_eigs, columns x_n with x'Mx = 1
    std::string weight_id;
    int m_max = 0, k_max = 0, nr = 0, ntheta = 0;
    bool degenerate = false;            // some discrete modes were discarded
    int n_discarded = 0;
    bool bandwidth_warning = false;
};

// Solves K x = lambda M x with K = diag(mu_i) by the symmetric transform
// S = K^{-1/2} M K^{-1/2}; eigenvalues of S are 1/lambda. Discrete modes with
// S-eigenvalue <= eps * max are discarded as spurious (weight degenerate on
// the discrete level) and flagged; the rest are returned, ascending in lambda.
inline Spectrum solve_weighted(const DiscBasis& basis, const std::vector<double>& weight_values,
                               const QuadratureGrid& g, int n_eigs,
                               const std::string& weight_id = "", int weight_bandwidth = -1) {
    const int n = basis.size();
    if (n_eigs < 1 || n_eigs > n)
        throw InvalidParameter("solve_weighted: need 1 <= n_eigs <= basis size");

    MassMatrix mm = assemble_mass(basis, weight_values, g, weight_bandwidth);

    Eigen::VectorXd inv_sqrt_mu(n);
    for (int i = 0; i < n; ++i) inv_sqrt_mu(i) = 1.0 / std::sqrt(basis.modes[i].mu);
    Eigen::MatrixXd Smat = inv_sqrt_mu.asDiagonal() * mm.M * inv_sqrt_mu.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Smat);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("solve_weighted: dense symmetric eigensolver failed");
    const Eigen::VectorXd mu_hat = es.eigenvalues(); // ascending
    const double mu_hat_max = mu_hat(n - 1);

    Spectrum spec;
    spec.weight_id = weight_id;
    spec.m_max = basis.m_max;
    spec.k_max = basis.k_max;
    spec.nr = g.nr;
    spec.ntheta = g.ntheta;
    spec.bandwidth_warning = mm.bandwidth_warning;

    const double cutoff = std::numeric_limits<double>::epsilon() * std::max(mu_hat_max, 0.0);
    std::vector<int> kept; // descending mu_hat => ascending lambda
    for (int i = n - 1; i >= 0; --i)
        if (mu_hat(i) > cutoff) kept.push_back(i);
    spec.n_discarded = n - static_cast<int>(kept.size());
    spec.degenerate = spec.n_discarded > 0;

    const int n_out = std::min<int>(n_eigs, static_cast<int>(kept.size()));
    spec.eigenvalues.resize(n_out);
    spec.coeffs.resize(n, n_out);
    for (int c = 0; c < n_out; ++c) {
        const int idx = kept[c];
        spec.eigenvalues[c] = 1.0 / mu_hat(idx);
        Eigen::VectorXd x = inv_sqrt_mu.asDiagonal() * es.eigenvectors().col(idx);
        x /= std::sqrt(mu_hat(idx)); // x' M x = 1
        // deterministic sign: largest-magnitude coefficient positive
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::fabs(x(i)) > std::fabs(x(imax))) imax = i;
        if (x(imax) < 0.0) x = -x;
        spec.coeffs.col(c) = x;
    }

    // Break ordering ties in near-degenerate pairs by the dominant
    // coefficient's (m, parity, k).
    auto mode_key = [&](int c) {
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::fabs(spec.coeffs(i, c)) > std::fabs(spec.coeffs(imax, c))) imax = i;
        const BasisMode& md = basis.modes[imax];
        return std::tuple<int, int, int>(md.m, md.parity, md.k);
    };
    for (int c = 0; c + 1 < n_out; ++c) {
        int e = c;
        while (e + 1 < n_out &&
               std::fabs(spec.eigenvalues[e + 1] - spec.eigenvalues[c]) <=
                   1e-9 * spec.eigenvalues[c])
            ++e;
        if (e > c) {
            std::vector<int> order;
            for (int t = c; t <= e; ++t) order.push_back(t);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return mode_key(a) < mode_key(b); });
            std::vector<double> ev(e - c + 1);
            Eigen::MatrixXd cols(n, e - c + 1);
            for (int t = 0; t <= e - c; ++t) {
                ev[t] = spec.eigenvalues[order[t]];
                cols.col(t) = spec.coeffs.col(order[t]);
            }
            for (int t = 0; t <= e - c; ++t) {
                spec.eigenvalues[c + t] = ev[t];
                spec.coeffs.col(c + t) = cols.col(t);
            }
            c = e;
        }
    }
    return spec;
}

// Sharp Poincare constant of the transplanted domain, K* = 1/sqrt(lambda_1).
inline double kstar(const Spectrum& spec) {
    if (spec.eigenvalues.empty())
        throw InvalidParameter("kstar: empty spectrum");
    return 1.0 / std::sqrt(spec.eigenvalues.front());
}

// Weighted L2 norm sqrt(iint h |f|^2) of a coefficient vector in the basis,
// evaluated by node-level quadrature (equals sqrt(f' M f) at the same grid).
inline double l2h_norm(const Eigen::VectorXd& f, const DiscBasis& basis,
                       const std::vector<double>& weight_values, const QuadratureGrid& g) {
    if (f.size() != basis.size())
        throw InvalidParameter("l2h_norm: coefficient count does not match basis");
    if (weight_values.size() != g.size())
        throw InvalidParameter("l2h_norm: weight values do not match grid");
    const auto R = radial_values(basis, g);
    std::vector<double> buf(g.size());
    for (int a = 0; a < g.nr; ++a)
        for (int b = 0; b < g.ntheta; ++b) {
            const std::size_t idx = static_cast<std::size_t>(a) * g.ntheta + b;
            double val = 0.0;
            for (int i = 0; i < basis.size(); ++i) {
                const BasisMode& md = basis.modes[i];
                const double ang = (md.parity == 0) ? std::cos(md.m * g.theta[b])
                                                    : std::sin(md.m * g.theta[b]);
                val += f(i) * R[i][a] * ang;
            }
            buf[idx] = weight_values[idx] * val * val * g.weights[idx];
        }
    return std::sqrt(pairwise_sum(buf));
}

} // namespace confspec
