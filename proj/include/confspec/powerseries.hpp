#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "confspec/errors.hpp"
#include "confspec/pairwise.hpp"
#include "confspec/quadrature.hpp"

namespace confspec {

// Truncated power series phi(z) = sum a_k z^k representing a conformal map
// of the unit disc. Construction rejects a_1 = 0 and any vanishing of phi'
// on a 64 x 256 validation grid (radii i/64 including the boundary ring).
// Injectivity itself is assumed, not verified.
class PowerSeriesMap {
public:
    PowerSeriesMap(std::vector<complexd> coeffs, std::string label)
        : coeffs_(std::move(coeffs)), label_(std::move(label)) {
        if (coeffs_.size() < 2)
            throw InvalidParameter("PowerSeriesMap: need degree >= 1 (at least coefficients a0, a1)");
        if (std::abs(coeffs_[1]) == 0.0)
            throw InvalidParameter("PowerSeriesMap: a1 must be nonzero (phi'(0) != 0)");
        validate_derivative();
    }

    const std::vector<complexd>& coeffs() const { return coeffs_; }
    const std::string& label() const { return label_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    complexd eval(complexd z) const {
        complexd acc = coeffs_.back();
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + coeffs_[k];
        return acc;
    }

    complexd derivative(complexd z) const {
        const std::size_t n = coeffs_.size();
        complexd acc = static_cast<double>(n - 1) * coeffs_[n - 1];
        for (std::size_t k = n - 1; k-- > 1;) acc = acc * z + static_cast<double>(k) * coeffs_[k];
        return acc;
    }

    double jacobian(complexd z) const { return std::norm(derivative(z)); }

    bool operator==(const PowerSeriesMap& o) const { return coeffs_ == o.coeffs_; }

private:
    void validate_derivative() const {
        constexpr int n_radii = 64, n_angles = 256;
        for (int i = 1; i <= n_radii; ++i) {
            const double r = static_cast<double>(i) / n_radii;
            for (int j = 0; j < n_angles; ++j) {
                const double th = 2.0 * std::numbers::pi * j / n_angles;
                if (std::abs(derivative(std::polar(r, th))) <= 0.0)
                    throw InvalidParameter("PowerSeriesMap: phi' vanishes on the validation grid");
            }
        }
    }

    std::vector<complexd> coeffs_;
    std::string label_;
};

// Evaluator for the conformal weight h(z) = |phi'(z)|^2 = J_phi(z).
class ConformalWeight {
public:
    explicit ConformalWeight(PowerSeriesMap map) : map_(std::move(map)) {}

    double operator()(complexd z) const { return map_.jacobian(z); }
    const PowerSeriesMap& source() const { return map_; }

    std::vector<double> values(const QuadratureGrid& g) const {
        return g.sample([this](complexd z) { return map_.jacobian(z); });
    }

private:
    PowerSeriesMap map_;
};

// --- built-in families -----------------------------------------------------

inline PowerSeriesMap identity_map() {
    return PowerSeriesMap({complexd(0.0), complexd(1.0)}, "identity");
}

inline PowerSeriesMap scale_map(double r) {
    if (!(r > 0.0)) throw InvalidParameter("scale_map: r must be positive");
    return PowerSeriesMap({complexd(0.0), complexd(r)}, "scale(" + std::to_string(r) + ")");
}

// z + eps z^k, univalent for |eps| < 1/k.
inline PowerSeriesMap perturbation_map(double eps, int k) {
    if (k < 2) throw InvalidParameter("perturbation_map: k must be >= 2");
    if (!(std::fabs(eps) < 1.0 / k))
        throw UnivalenceViolation("perturbation_map: need |eps| < 1/k for univalence");
    std::vector<complexd> c(k + 1, complexd(0.0));
    c[1] = 1.0;
    c[k] = eps;
    return PowerSeriesMap(std::move(c),
                          "perturbation(" + std::to_string(eps) + "," + std::to_string(k) + ")");
}

// Antiderivative of (1 - zeta^4)^(-1/2): the disc-to-square map
//   phi(z) = sum_{n>=0} C(2n,n) 4^{-n} (4n+1)^{-1} z^{4n+1}.
// Binomials are carried as exact integers so each coefficient incurs only
// the final IEEE roundings and is reproducible bit-for-bit.
inline PowerSeriesMap disc_to_square_map(int terms) {
    if (terms < 1) throw InvalidParameter("disc_to_square_map: terms must be >= 1");
    std::vector<complexd> c(4 * (terms - 1) + 2, complexd(0.0));
    boost::multiprecision::cpp_int binom = 1; // C(2n,n)
    for (int n = 0; n < terms; ++n) {
        if (n > 0) binom = binom * (2 * (2 * n - 1)) / n; // C(2n,n) = C(2n-2,n-1)*2(2n-1)/n
        const double b = std::ldexp(binom.convert_to<double>(), -2 * n); // C(2n,n)/4^n
        c[4 * n + 1] = b / (4 * n + 1);
    }
    return PowerSeriesMap(std::move(c), "disc_to_square(" + std::to_string(terms) + ")");
}

// --- map-level functionals --------------------------------------------------

// max |f| over the quadrature nodes plus a boundary ring r=1 (|phi'| attains
// its sup on |z|=1 by the maximum principle, so the ring makes the grid max
// a much tighter lower bound). Reported values are still grid maxima.
template <class F>
double grid_max(const QuadratureGrid& g, F&& f) {
    double mx = 0.0;
    for (int a = 0; a < g.nr; ++a)
        for (int b = 0; b < g.ntheta; ++b)
            mx = std::max(mx, f(g.node(a, b)));
    for (int b = 0; b < g.ntheta; ++b)
        mx = std::max(mx, f(std::polar(1.0, g.theta[b])));
    return mx;
}

inline double lp_seminorm(const PowerSeriesMap& m, double p, const QuadratureGrid& g) {
    if (!(p >= 1.0)) throw InvalidParameter("lp_seminorm: p must be >= 1");
    if (std::isinf(p))
        return grid_max(g, [&](complexd z) { return std::abs(m.derivative(z)); });
    const double val = integrate_fn(g, [&](complexd z) {
        return std::pow(std::abs(m.derivative(z)), p);
    });
    return std::pow(val, 1.0 / p);
}

struct DerivativeDistance {
    double abs_diff; // || |phi1'| - |phi2'| ||_L2
    double diff;     // || phi1' - phi2' ||_L2
};

inline DerivativeDistance l2_derivative_distance(const PowerSeriesMap& m1,
                                                 const PowerSeriesMap& m2,
                                                 const QuadratureGrid& g) {
    const double a = integrate_fn(g, [&](complexd z) {
        const double d = std::abs(m1.derivative(z)) - std::abs(m2.derivative(z));
        return d * d;
    });
    const double b = integrate_fn(g, [&](complexd z) {
        return std::norm(m1.derivative(z) - m2.derivative(z));
    });
    return {std::sqrt(a), std::sqrt(b)};
}

inline double ds_distance(const ConformalWeight& h1, const ConformalWeight& h2,
                          double s, const QuadratureGrid& g) {
    if (!(s > 1.0)) throw InvalidParameter("ds_distance: s must be > 1");
    if (std::isinf(s))
        return grid_max(g, [&](complexd z) { return std::fabs(h1(z) - h2(z)); });
    const double val = integrate_fn(g, [&](complexd z) {
        return std::pow(std::fabs(h1(z) - h2(z)), s);
    });
    return std::pow(val, 1.0 / s);
}

struct MeasureVariation {
    double plus;  // integral over {J1 >= J2} of J1 - J2
    double minus; // integral over {J1 <  J2} of J2 - J1
    double total; // plus + minus
};

// Node membership in D+/D- decided pointwise; ties J1 = J2 go to D+.
inline MeasureVariation measure_variation(const PowerSeriesMap& m1, const PowerSeriesMap& m2,
                                          const QuadratureGrid& g) {
    std::vector<double> bp(g.size(), 0.0), bm(g.size(), 0.0);
    for (int a = 0; a < g.nr; ++a)
        for (int b = 0; b < g.ntheta; ++b) {
            const std::size_t i = static_cast<std::size_t>(a) * g.ntheta + b;
            const complexd z = g.node(a, b);
            const double d = m1.jacobian(z) - m2.jacobian(z);
            if (d >= 0.0)
                bp[i] = d * g.weights[i];
            else
                bm[i] = -d * g.weights[i];
        }
    MeasureVariation mv;
    mv.plus = pairwise_sum(bp);
    mv.minus = pairwise_sum(bm);
    mv.total = mv.plus + mv.minus;
    return mv;
}

inline double area(const PowerSeriesMap& m, const QuadratureGrid& g) {
    return integrate_fn(g, [&](complexd z) { return m.jacobian(z); });
}

// Green's theorem cross-check: (1/2) |oint x dy - y dx| over the image of the
// unit circle. The integrand is a trigonometric polynomial of degree 2N, so a
// periodic trapezoid with > 2N samples evaluates it exactly.
inline double boundary_area(const PowerSeriesMap& m) {
    const int n = std::max(1024, 4 * m.degree() + 8);
    std::vector<double> buf(n);
    const double dt = 2.0 * std::numbers::pi / n;
    for (int j = 0; j < n; ++j) {
        const complexd e = std::polar(1.0, dt * j);
        const complexd w = m.eval(e);
        const complexd dw = m.derivative(e) * complexd(0.0, 1.0) * e;
        buf[j] = std::imag(std::conj(w) * dw) * dt;
    }
    return 0.5 * std::fabs(pairwise_sum(buf));
}

inline double linf_seminorm_distance(const PowerSeriesMap& m1, const PowerSeriesMap& m2,
                                     const QuadratureGrid& g) {
    return grid_max(g, [&](complexd z) { return std::abs(m1.derivative(z) - m2.derivative(z)); });
}

// Membership certificate for the class G_{p,tau} (and F_tau when p = inf,
// where the essential infimum of the Jacobian is reported alongside).
struct ClassCertificate {
    double p = 0.0;
    double seminorm = 0.0;
    double tau = 0.0;
    bool member = false;
    double quad_error = 0.0;             // grid-doubling estimate
    double inf_jac = std::numeric_limits<double>::quiet_NaN(); // p = inf only
    bool grid_max_flag = false;          // p = inf values are grid maxima
};

} // namespace confspec
