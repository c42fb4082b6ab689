#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "confspec/quadrature.hpp"

using namespace confspec;

TEST_CASE("grid weights sum to pi") {
    for (auto [nr, nt] : {std::pair{4, 8}, {16, 32}, {64, 256}}) {
        auto g = build_grid(nr, nt);
        std::vector<double> ones(g.size(), 1.0);
        REQUIRE(std::fabs(integrate(g, ones) - std::numbers::pi) < 1e-12);
    }
}

TEST_CASE("radial nodes strictly inside (0,1), uniform angles") {
    auto g = build_grid(16, 32);
    for (double r : g.r) {
        REQUIRE(r > 0.0);
        REQUIRE(r < 1.0);
    }
    for (int b = 0; b < g.ntheta; ++b)
        REQUIRE(g.theta[b] == Catch::Approx(2.0 * std::numbers::pi * b / g.ntheta));
}

TEST_CASE("polynomial-harmonic exactness") {
    auto g = build_grid(16, 32);
    // iint r^2 dxdy = pi/2
    REQUIRE(integrate_fn(g, [](complexd z) { return std::norm(z); }) ==
            Catch::Approx(std::numbers::pi / 2).epsilon(1e-14));
    // iint x dxdy = 0 by symmetry
    REQUIRE(std::fabs(integrate_fn(g, [](complexd z) { return z.real(); })) < 1e-14);
    // iint r^{2m} cos(k theta): zero for 1 <= k < ntheta, closed form for k=0
    for (int m : {0, 1, 2, 5}) {
        for (int k : {1, 2, 7, 31}) {
            const double v = integrate_fn(g, [&](complexd z) {
                return std::pow(std::abs(z), 2 * m) * std::cos(k * std::arg(z));
            });
            REQUIRE(std::fabs(v) < 1e-13);
        }
        const double v0 = integrate_fn(g, [&](complexd z) {
            return std::pow(std::abs(z), 2 * m);
        });
        REQUIRE(v0 == Catch::Approx(2.0 * std::numbers::pi / (2 * m + 2)).epsilon(1e-13));
    }
}

TEST_CASE("parameter validation") {
    REQUIRE_THROWS_AS(build_grid(3, 32), InvalidParameter);
    REQUIRE_THROWS_AS(build_grid(8, 6), InvalidParameter);
    REQUIRE_THROWS_AS(build_grid(8, 9), InvalidParameter);
    auto g = build_grid(4, 8);
    std::vector<double> wrong(g.size() + 1, 0.0);
    REQUIRE_THROWS_AS(integrate(g, wrong), InvalidParameter);
}

TEST_CASE("grid doubling self-consistency on a smooth integrand") {
    auto f = [](complexd z) { return std::exp(z.real()) * std::cos(2.0 * z.imag()); };
    auto g1 = build_grid(16, 32);
    auto g2 = doubled(g1);
    auto g4 = doubled(g2);
    const double v1 = integrate_fn(g1, f);
    const double v2 = integrate_fn(g2, f);
    const double v4 = integrate_fn(g4, f);
    // the doubling discrepancy bounds the remaining error
    REQUIRE(std::fabs(v2 - v4) <= std::fabs(v1 - v2) + 1e-14);
    REQUIRE(std::fabs(v1 - v2) < 1e-10);
}

TEST_CASE("pairwise summation is fixed-order deterministic") {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * i) * 1e-3;
    const double a = pairwise_sum(v);
    const double b = pairwise_sum(v);
    REQUIRE(a == b);
    auto g = build_grid(32, 64);
    std::vector<double> vals(g.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::cos(0.01 * i);
    REQUIRE(integrate(g, vals) == integrate(g, vals));
}
