#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confspec/discspec.hpp"
#include "confspec/errors.hpp"
#include "confspec/powerseries.hpp"
#include "confspec/quadrature.hpp"

namespace confspec {

// Variational estimate of the best constant in ||f||_q <= C(q) ||grad f||_2
// for f vanishing on the unit circle. The maximizer is radially decreasing
// (symmetrization), so the search runs over the radial (m = 0) Bessel modes.
// The value converges to C(q) from below as the basis grows.
struct SobolevConstantEstimate {
    double q = 2.0;
    double value = 0.0;
    enum class Mode { variational, user_override } mode = Mode::variational;
    int basis_size = 0;
    int iterations = 0;
    double residual = 0.0;
    bool converged = true;
};

namespace detail {

struct RadialQuad {
    std::vector<double> r, w; // weight includes 2*pi*r
};

inline RadialQuad radial_quadrature(int n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    RadialQuad q;
    q.r.resize(n);
    q.w.resize(n);
    for (int i = 0; i < n; ++i) {
        q.r[i] = 0.5 * (x[i] + 1.0);
        q.w[i] = 0.5 * w[i] * q.r[i] * 2.0 * std::numbers::pi;
    }
    return q;
}

} // namespace detail

// Projected ascent on {c : sum mu_k c_k^2 = 1} for the ratio ||f_c||_q.
// seed = 0 starts from the first mode (the exact maximizer for q = 2);
// seed > 0 draws a random start.
inline SobolevConstantEstimate estimate_cq(double q, int basis_size, double tol,
                                           std::uint64_t seed = 0, int max_iter = 20000) {
    if (!(q >= 2.0)) throw InvalidParameter("estimate_cq: q must be >= 2");
    if (basis_size < 1) throw InvalidParameter("estimate_cq: basis_size must be >= 1");

    const auto zeros = bessel_zero_table(0, std::min(basis_size, 64));
    if (basis_size > 64) throw InvalidParameter("estimate_cq: basis_size must be <= 64");

    const int nq = 200;
    const auto quad = detail::radial_quadrature(nq);

    // psi_k(r) = norm_k J_0(j_k r), L2-normalized on the disc; mu_k = j_k^2.
    Eigen::MatrixXd psi(nq, basis_size);
    Eigen::VectorXd mu(basis_size);
    for (int k = 0; k < basis_size; ++k) {
        const double j = zeros[0][k];
        const double norm = 1.0 / (std::sqrt(std::numbers::pi) * std::fabs(bessel_j(1, j)));
        mu(k) = j * j;
        for (int i = 0; i < nq; ++i) psi(i, k) = norm * bessel_j(0, j * quad.r[i]);
    }

    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis_size);
    if (seed == 0) {
        c(0) = 1.0;
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        for (int k = 0; k < basis_size; ++k) c(k) = nd(rng);
    }
    auto normalize = [&](Eigen::VectorXd& v) {
        v /= std::sqrt(v.dot(mu.asDiagonal() * v));
    };
    normalize(c);

    auto ratio = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd f = psi * v;
        double s = 0.0;
        for (int i = 0; i < nq; ++i) s += std::pow(std::fabs(f(i)), q) * quad.w[i];
        return std::pow(s, 1.0 / q);
    };

    SobolevConstantEstimate est;
    est.q = q;
    est.basis_size = basis_size;

    double rho = ratio(c);
    int it = 0;
    double change = 0.0;
    for (; it < max_iter; ++it) {
        // gradient of ||f||_q at c: rho^(1-q) * int |f|^(q-1) sgn(f) psi_k
        Eigen::VectorXd f = psi * c;
        Eigen::VectorXd fq(nq);
        for (int i = 0; i < nq; ++i)
            fq(i) = std::pow(std::fabs(f(i)), q - 1.0) * (f(i) >= 0.0 ? 1.0 : -1.0) * quad.w[i];
        Eigen::VectorXd grad = std::pow(rho, 1.0 - q) * (psi.transpose() * fq);

        // fixed point of the stationarity condition grad = theta * diag(mu) c
        Eigen::VectorXd cn = mu.cwiseInverse().asDiagonal() * grad;
        normalize(cn);
        double rn = ratio(cn);
        // damp toward the previous iterate if the ratio dropped
        for (int half = 0; half < 40 && rn < rho; ++half) {
            cn = 0.5 * (cn + c);
            normalize(cn);
            rn = ratio(cn);
        }
        change = std::fabs(rn - rho);
        c = cn;
        rho = rn;
        if (change <= tol * std::max(rho, 1e-300)) {
            ++it;
            break;
        }
    }
    est.value = rho;
    est.iterations = it;
    est.residual = change;
    est.converged = it < max_iter;
    if (!est.converged) est.residual = change; // best iterate returned, flagged
    return est;
}

// Lemma bound B c~_n / (1 + B sqrt(c~_n)) with c~_n = max(lam1_n^2, lam2_n^2).
inline double bound_two_weight(double B, double lam1_n, double lam2_n) {
    if (B < 0.0) throw InvalidParameter("bound_two_weight: B must be >= 0");
    if (!(lam1_n > 0.0) || !(lam2_n > 0.0))
        throw InvalidParameter("bound_two_weight: eigenvalues must be positive");
    const double ct = std::max(lam1_n * lam1_n, lam2_n * lam2_n);
    return B * ct / (1.0 + B * std::sqrt(ct));
}

// B = [C(2s/(s-1))]^2 d_s(h1,h2); the supplied estimate must carry the
// matching exponent.
inline double b_from_ds(double ds, double s, const SobolevConstantEstimate& cq) {
    if (!(s > 1.0)) throw InvalidParameter("b_from_ds: s must be > 1");
    const double q = std::isinf(s) ? 2.0 : 2.0 * s / (s - 1.0);
    if (std::fabs(cq.q - q) > 1e-9 * std::max(1.0, q))
        throw ExponentMismatch("b_from_ds: estimate exponent does not equal 2s/(s-1)");
    return cq.value * cq.value * ds;
}

struct OptimalB {
    double B = 0.0;          // 1 / lambda_1[|h1-h2|], the minimal admissible B
    double lambda1 = std::numeric_limits<double>::infinity();
    bool degenerate = false; // all discrete modes collapsed (h1 = h2 on grid)
};

// Minimal B in the two-weight inequality: solve the weighted problem with the
// degenerate weight |h1 - h2|.
inline OptimalB optimal_b(const std::vector<double>& h1_values,
                          const std::vector<double>& h2_values, const DiscBasis& basis,
                          const QuadratureGrid& g) {
    if (h1_values.size() != h2_values.size() || h1_values.size() != g.size())
        throw InvalidParameter("optimal_b: weight values do not match grid");
    std::vector<double> diff(h1_values.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = std::fabs(h1_values[i] - h2_values[i]);

    Spectrum spec = solve_weighted(basis, diff, g, 1, "|h1-h2|");
    OptimalB out;
    if (spec.eigenvalues.empty()) {
        out.degenerate = true;
        return out; // B = 0
    }
    out.lambda1 = spec.eigenvalues.front();
    out.degenerate = spec.degenerate;
    out.B = 1.0 / out.lambda1;
    return out;
}

struct SolverParams {
    int m_max = 12;
    int k_max = 12;
    int nr = 64;
    int ntheta = 256;
    int cq_basis = 32;
    double cq_tol = 1e-10;
};

struct StabilityReport {
    int n_max = 0;
    double p = 0.0, s = 0.0, q = 0.0;

    std::vector<double> lambdas1, lambdas2, diffs;
    std::vector<double> c_n;             // max(lam_n^2), = c~_n under transplantation
    std::vector<double> bound_thm44, bound_thm33, bound_lemma31, bound_remark, bound_measure;
    std::vector<double> slack;           // 10x grid-doubling error, per n
    std::vector<bool> satisfied;         // diff <= each bound + slack
    std::vector<bool> trivial_regime;    // tightest bound exceeds sqrt(c_n)

    double ds = 0.0;                     // d_s(h1,h2), s = 2p/(p+2)
    double l2_abs_deriv = 0.0;           // || |phi1'|-|phi2'| ||_2
    double l2_deriv = 0.0;               // || phi1'-phi2' ||_2
    double lp1 = 0.0, lp2 = 0.0;         // || phi_i' ||_p
    MeasureVariation mv{};

    SobolevConstantEstimate cq;
    double B_lem32 = 0.0;                // [C]^2 d_s
    OptimalB optB;
    double tau = 0.0;                    // max of the two seminorms
    double B_ptau = 0.0;                 // [C(4p/(p-2))]^2 * 2 tau
    ClassCertificate cert1, cert2;

    SolverParams params;
    bool grid_max_flag = false;          // p = inf norms are grid maxima
    bool degenerate_weight = false;
    std::string map1_label, map2_label;
    double max_quad_error = 0.0;         // largest grid-doubling discrepancy seen
};

inline ClassCertificate check_class(const PowerSeriesMap& map, double p, double tau,
                                    const QuadratureGrid& g) {
    if (!(p > 2.0)) throw InvalidParameter("check_class: p must be in (2, inf]");
    ClassCertificate cert;
    cert.p = p;
    cert.tau = tau;
    cert.seminorm = lp_seminorm(map, p, g);
    const double sn2 = lp_seminorm(map, p, doubled(g));
    cert.quad_error = std::fabs(cert.seminorm - sn2);
    cert.member = cert.seminorm <= tau + cert.quad_error;
    if (std::isinf(p)) {
        cert.grid_max_flag = true;
        double mn = std::numeric_limits<double>::infinity();
        for (int a = 0; a < g.nr; ++a)
            for (int b = 0; b < g.ntheta; ++b)
                mn = std::min(mn, map.jacobian(g.node(a, b)));
        for (int b = 0; b < g.ntheta; ++b)
            mn = std::min(mn, map.jacobian(std::polar(1.0, g.theta[b])));
        cert.inf_jac = mn;
    }
    return cert;
}

// Memoizes the expensive pieces (spectra, C(q), optimal B) across reports so
// lattice sweeps do not recompute them per pair.
class StabilityContext {
public:
    const Spectrum& spectrum(const PowerSeriesMap& map, const DiscBasis& basis,
                             const QuadratureGrid& g, int n_eigs) {
        const std::string key = map.label() + coeff_key(map) + grid_key(g, basis) +
                                "#n" + std::to_string(n_eigs);
        auto it = spectra_.find(key);
        if (it == spectra_.end()) {
            ConformalWeight h(map);
            it = spectra_
                     .emplace(key, solve_weighted(basis, h.values(g), g, n_eigs, map.label(),
                                                  2 * std::max(0, map.degree() - 1)))
                     .first;
        }
        return it->second;
    }

    const SobolevConstantEstimate& cq(double q, int basis_size, double tol) {
        const std::string key = std::to_string(q) + "#" + std::to_string(basis_size);
        auto it = cqs_.find(key);
        if (it == cqs_.end()) it = cqs_.emplace(key, estimate_cq(q, basis_size, tol)).first;
        return it->second;
    }

    const OptimalB& opt_b(const PowerSeriesMap& m1, const PowerSeriesMap& m2,
                          const DiscBasis& basis, const QuadratureGrid& g) {
        std::string a = m1.label() + coeff_key(m1), b = m2.label() + coeff_key(m2);
        if (b < a) std::swap(a, b); // |h1-h2| is symmetric
        const std::string key = a + "|" + b + grid_key(g, basis);
        auto it = optbs_.find(key);
        if (it == optbs_.end()) {
            ConformalWeight h1(m1), h2(m2);
            it = optbs_.emplace(key, optimal_b(h1.values(g), h2.values(g), basis, g)).first;
        }
        return it->second;
    }

    const DiscBasis& basis(int m_max, int k_max) {
        const std::string key = std::to_string(m_max) + "x" + std::to_string(k_max);
        auto it = bases_.find(key);
        if (it == bases_.end()) it = bases_.emplace(key, build_basis(m_max, k_max)).first;
        return it->second;
    }

private:
    static std::string coeff_key(const PowerSeriesMap& map) {
        std::string k;
        k.reserve(map.coeffs().size() * 2 * sizeof(double));
        for (const complexd& c : map.coeffs()) {
            const double re = c.real(), im = c.imag();
            k.append(reinterpret_cast<const char*>(&re), sizeof(double));
            k.append(reinterpret_cast<const char*>(&im), sizeof(double));
        }
        return k;
    }
    static std::string grid_key(const QuadratureGrid& g, const DiscBasis& b) {
        return "#g" + std::to_string(g.nr) + "x" + std::to_string(g.ntheta) + "#b" +
               std::to_string(b.m_max) + "x" + std::to_string(b.k_max);
    }

    std::map<std::string, Spectrum> spectra_;
    std::map<std::string, SobolevConstantEstimate> cqs_;
    std::map<std::string, OptimalB> optbs_;
    std::map<std::string, DiscBasis> bases_;
};

// All bound ingredients and satisfaction flags for a pair of maps.
// Every grid-dependent quantity is recomputed on the doubled grid; the
// per-n slack is 10x the resulting discrepancy, so inequality checks do not
// fail from discretization alone.
inline StabilityReport full_report(const PowerSeriesMap& m1, const PowerSeriesMap& m2, double p,
                                   int n_max, const SolverParams& params = {},
                                   StabilityContext* ctx_in = nullptr) {
    if (!(p > 2.0)) throw InvalidParameter("full_report: p must be in (2, inf]");
    if (n_max < 1) throw InvalidParameter("full_report: n_max must be >= 1");

    StabilityContext local;
    StabilityContext& ctx = ctx_in ? *ctx_in : local;

    StabilityReport rep;
    rep.n_max = n_max;
    rep.p = p;
    rep.s = std::isinf(p) ? 2.0 : 2.0 * p / (p + 2.0);
    rep.q = std::isinf(p) ? 4.0 : 4.0 * p / (p - 2.0);
    rep.params = params;
    rep.grid_max_flag = std::isinf(p);
    rep.map1_label = m1.label();
    rep.map2_label = m2.label();

    const DiscBasis& basis = ctx.basis(params.m_max, params.k_max);
    const QuadratureGrid g = build_grid(params.nr, params.ntheta);
    const QuadratureGrid g2 = doubled(g);

    const ConformalWeight h1(m1), h2(m2);

    struct GridQuantities {
        std::vector<double> lam1, lam2;
        double ds, l2abs, l2full, lp1, lp2;
        MeasureVariation mv;
        OptimalB ob;
    };
    auto compute = [&](const QuadratureGrid& grid) {
        GridQuantities gq;
        gq.lam1 = ctx.spectrum(m1, basis, grid, n_max).eigenvalues;
        gq.lam2 = ctx.spectrum(m2, basis, grid, n_max).eigenvalues;
        gq.ds = ds_distance(h1, h2, rep.s, grid);
        const DerivativeDistance dd = l2_derivative_distance(m1, m2, grid);
        gq.l2abs = dd.abs_diff;
        gq.l2full = dd.diff;
        gq.lp1 = lp_seminorm(m1, p, grid);
        gq.lp2 = lp_seminorm(m2, p, grid);
        gq.mv = measure_variation(m1, m2, grid);
        gq.ob = ctx.opt_b(m1, m2, basis, grid);
        return gq;
    };
    const GridQuantities base = compute(g);
    const GridQuantities fine = compute(g2);

    rep.cq = ctx.cq(rep.q, params.cq_basis, params.cq_tol);
    const double C2 = rep.cq.value * rep.cq.value;

    rep.lambdas1 = base.lam1;
    rep.lambdas2 = base.lam2;
    rep.ds = base.ds;
    rep.l2_abs_deriv = base.l2abs;
    rep.l2_deriv = base.l2full;
    rep.lp1 = base.lp1;
    rep.lp2 = base.lp2;
    rep.mv = base.mv;
    rep.optB = base.ob;
    rep.degenerate_weight = base.ob.degenerate;
    rep.B_lem32 = C2 * base.ds;
    rep.tau = std::max(base.lp1, base.lp2);
    rep.B_ptau = C2 * 2.0 * rep.tau;
    rep.cert1 = check_class(m1, p, rep.tau, g);
    rep.cert2 = check_class(m2, p, rep.tau, g);

    const int n_have = static_cast<int>(std::min(base.lam1.size(), base.lam2.size()));
    rep.n_max = std::min(rep.n_max, n_have);

    auto bounds_at = [&](const GridQuantities& gq, int i, double& b44, double& b33, double& b31,
                         double& brem, double& bmv) {
        const double cn = std::max(gq.lam1[i] * gq.lam1[i], gq.lam2[i] * gq.lam2[i]);
        const double norm_sum = gq.lp1 + gq.lp2;
        b44 = cn * C2 * norm_sum * gq.l2abs;
        b33 = cn * C2 * gq.ds;
        b31 = bound_two_weight(gq.ob.B, gq.lam1[i], gq.lam2[i]);
        brem = cn * gq.ob.B;
        bmv = cn * C2 * norm_sum * std::sqrt(std::max(gq.mv.total, 0.0));
    };

    rep.diffs.resize(rep.n_max);
    rep.c_n.resize(rep.n_max);
    rep.bound_thm44.resize(rep.n_max);
    rep.bound_thm33.resize(rep.n_max);
    rep.bound_lemma31.resize(rep.n_max);
    rep.bound_remark.resize(rep.n_max);
    rep.bound_measure.resize(rep.n_max);
    rep.slack.resize(rep.n_max);
    rep.satisfied.resize(rep.n_max);
    rep.trivial_regime.resize(rep.n_max);

    for (int i = 0; i < rep.n_max; ++i) {
        rep.diffs[i] = std::fabs(base.lam1[i] - base.lam2[i]);
        rep.c_n[i] = std::max(base.lam1[i] * base.lam1[i], base.lam2[i] * base.lam2[i]);

        double b44, b33, b31, brem, bmv;
        bounds_at(base, i, b44, b33, b31, brem, bmv);
        double f44, f33, f31, frem, fmv;
        bounds_at(fine, i, f44, f33, f31, frem, fmv);
        const double diff_fine = std::fabs(fine.lam1[i] - fine.lam2[i]);

        rep.bound_thm44[i] = b44;
        rep.bound_thm33[i] = b33;
        rep.bound_lemma31[i] = b31;
        rep.bound_remark[i] = brem;
        rep.bound_measure[i] = bmv;

        const double err_diff = std::fabs(rep.diffs[i] - diff_fine);
        const double err_bounds = std::max({std::fabs(b44 - f44), std::fabs(b33 - f33),
                                            std::fabs(b31 - f31), std::fabs(bmv - fmv)});
        const double floor_err = std::numeric_limits<double>::epsilon() *
                                 (rep.diffs[i] + std::max({b44, b33, b31}));
        const double err = std::max(err_diff + err_bounds, floor_err);
        rep.slack[i] = 10.0 * err;
        rep.max_quad_error = std::max(rep.max_quad_error, err);

        const double d = rep.diffs[i];
        rep.satisfied[i] = d <= b44 + rep.slack[i] && d <= b33 + rep.slack[i] &&
                           d <= b31 + rep.slack[i] && d <= bmv + rep.slack[i];
        const double tightest = std::min({b44, b33, b31, bmv});
        rep.trivial_regime[i] = tightest > std::sqrt(rep.c_n[i]);
    }
    return rep;
}

} // namespace confspec
