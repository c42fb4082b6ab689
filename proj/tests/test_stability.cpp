#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "confspec/stability.hpp"

using namespace confspec;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SolverParams small_params() {
    SolverParams p;
    p.m_max = 8;
    p.k_max = 8;
    p.nr = 32;
    p.ntheta = 128;
    return p;
}

} // namespace

TEST_CASE("C(2) is the sharp Poincare constant of the disc") {
    const double j01 = bessel_zero(0, 1);
    const auto est1 = estimate_cq(2.0, 1, 1e-12);
    REQUIRE(est1.value == Catch::Approx(1.0 / j01).epsilon(1e-10)); // single-mode quotient
    const auto est = estimate_cq(2.0, 32, 1e-10);
    REQUIRE(est.value == Catch::Approx(1.0 / j01).margin(1e-6));
    REQUIRE(est.converged);
    REQUIRE(est.mode == SobolevConstantEstimate::Mode::variational);
}

TEST_CASE("C(4) multi-start agreement") {
    const auto base = estimate_cq(4.0, 32, 1e-10, 0);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto est = estimate_cq(4.0, 32, 1e-10, seed);
        REQUIRE(est.value == Catch::Approx(base.value).epsilon(1e-8));
    }
    REQUIRE_THROWS_AS(estimate_cq(1.5, 32, 1e-10), InvalidParameter);
    REQUIRE_THROWS_AS(estimate_cq(4.0, 0, 1e-10), InvalidParameter);
    REQUIRE_THROWS_AS(estimate_cq(4.0, 65, 1e-10), InvalidParameter);
}

TEST_CASE("two-weight bound formula") {
    REQUIRE(bound_two_weight(0.0, 2.0, 3.0) == 0.0);
    REQUIRE(bound_two_weight(1.0, 2.0, 3.0) == Catch::Approx(2.25).epsilon(1e-15));
    // saturation: B -> inf gives sqrt(c~) = max eigenvalue
    REQUIRE(bound_two_weight(1e12, 2.0, 3.0) == Catch::Approx(3.0).epsilon(1e-6));
    REQUIRE_THROWS_AS(bound_two_weight(-1.0, 2.0, 3.0), InvalidParameter);
    REQUIRE_THROWS_AS(bound_two_weight(1.0, 0.0, 3.0), InvalidParameter);

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> ud(0.1, 10.0);
    for (int t = 0; t < 200; ++t) {
        const double B = ud(rng), l1 = ud(rng), l2 = ud(rng);
        const double v = bound_two_weight(B, l1, l2);
        // strict: B c~ / (1 + B sqrt(c~)) < B c~
        const double ct = std::max(l1 * l1, l2 * l2);
        REQUIRE(v < B * ct);
        // monotone in B and in each eigenvalue
        REQUIRE(bound_two_weight(B * 1.1, l1, l2) >= v);
        REQUIRE(bound_two_weight(B, l1 * 1.1, l2) >= v);
        REQUIRE(bound_two_weight(B, l1, l2 * 1.1) >= v);
    }
}

TEST_CASE("B from d_s") {
    const auto c4 = estimate_cq(4.0, 16, 1e-10);
    REQUIRE(b_from_ds(0.0, 2.0, c4) == 0.0);
    REQUIRE(b_from_ds(0.3, 2.0, c4) == Catch::Approx(c4.value * c4.value * 0.3).epsilon(1e-15));
    REQUIRE_THROWS_AS(b_from_ds(0.3, 3.0, c4), ExponentMismatch);
    REQUIRE_THROWS_AS(b_from_ds(0.3, 0.5, c4), InvalidParameter);
    // s = inf => q = 2 => B = d_inf / j01^2
    const auto c2 = estimate_cq(2.0, 32, 1e-12);
    const double j01 = bessel_zero(0, 1);
    REQUIRE(b_from_ds(0.5, kInf, c2) == Catch::Approx(0.5 / (j01 * j01)).margin(1e-6));
}

TEST_CASE("optimal B") {
    const auto g = build_grid(32, 128);
    const auto basis = build_basis(6, 6);
    const auto h1 = ConformalWeight(identity_map()).values(g);

    const auto same = optimal_b(h1, h1, basis, g);
    REQUIRE(same.degenerate);
    REQUIRE(same.B == 0.0);

    // constant difference weight 1 - r^2: lambda_1 = (1 - r^2) j01^2
    const double r = 0.6;
    const auto h2 = ConformalWeight(scale_map(r)).values(g);
    const auto ob = optimal_b(h1, h2, basis, g);
    const double j01 = bessel_zero(0, 1);
    REQUIRE(ob.B == Catch::Approx((1.0 - r * r) / (j01 * j01)).epsilon(1e-8));

    // remark optimality: minimal B never exceeds the Holder-derived B
    const auto hp = ConformalWeight(perturbation_map(0.1, 2)).values(g);
    const auto obp = optimal_b(h1, hp, basis, g);
    const ConformalWeight w1(identity_map()), wp(perturbation_map(0.1, 2));
    for (double s : {1.5, 2.0, 3.0}) {
        const auto cq = estimate_cq(2.0 * s / (s - 1.0), 32, 1e-10);
        REQUIRE(obp.B <= b_from_ds(ds_distance(w1, wp, s, g), s, cq) * (1.0 + 1e-6));
    }
    REQUIRE_THROWS_AS(optimal_b(h1, std::vector<double>(3, 1.0), basis, g), InvalidParameter);
}

TEST_CASE("class certificates") {
    const auto g = build_grid(32, 128);
    const auto c1 = check_class(identity_map(), 4.0, 2.0, g);
    REQUIRE(c1.member);
    REQUIRE(c1.seminorm == Catch::Approx(std::pow(std::numbers::pi, 0.25)).epsilon(1e-12));

    const auto c2 = check_class(scale_map(3.0), kInf, 1.0, g);
    REQUIRE_FALSE(c2.member);
    REQUIRE(c2.seminorm == Catch::Approx(3.0).epsilon(1e-14));
    REQUIRE(c2.grid_max_flag);
    REQUIRE(c2.inf_jac == Catch::Approx(9.0).epsilon(1e-14));

    // max |1 + 0.2 z| = 1.2 attained at the boundary node z = 1
    const auto c3 = check_class(perturbation_map(0.1, 2), kInf, 1.2, g);
    REQUIRE(c3.member);
    REQUIRE(c3.seminorm == Catch::Approx(1.2).epsilon(1e-14));

    REQUIRE_THROWS_AS(check_class(identity_map(), 2.0, 1.0, g), InvalidParameter);
}

TEST_CASE("full report on identical maps") {
    const auto rep = full_report(identity_map(), identity_map(), 4.0, 3, small_params());
    for (int n = 0; n < rep.n_max; ++n) {
        REQUIRE(rep.diffs[n] == 0.0);
        REQUIRE(rep.satisfied[n]);
        REQUIRE(rep.bound_thm44[n] == 0.0);
        REQUIRE(rep.bound_thm33[n] == 0.0);
        REQUIRE(rep.bound_lemma31[n] == 0.0);
    }
    REQUIRE(rep.degenerate_weight);
    REQUIRE(rep.ds == 0.0);
}

TEST_CASE("full report closed forms for a dilation pair") {
    const double r = 0.9, p = 4.0;
    const auto rep = full_report(identity_map(), scale_map(r), p, 3, small_params());
    REQUIRE(rep.s == Catch::Approx(2.0 * p / (p + 2.0)).epsilon(1e-15));
    REQUIRE(rep.q == Catch::Approx(4.0 * p / (p - 2.0)).epsilon(1e-15));
    REQUIRE(rep.lp1 == Catch::Approx(std::pow(std::numbers::pi, 1.0 / p)).epsilon(1e-12));
    REQUIRE(rep.lp2 == Catch::Approx(r * std::pow(std::numbers::pi, 1.0 / p)).epsilon(1e-12));
    REQUIRE(rep.l2_abs_deriv ==
            Catch::Approx((1.0 - r) * std::sqrt(std::numbers::pi)).epsilon(1e-12));
    REQUIRE(rep.mv.total ==
            Catch::Approx(std::numbers::pi * (1.0 - r * r)).epsilon(1e-12));
    const double C2 = rep.cq.value * rep.cq.value;
    for (int n = 0; n < rep.n_max; ++n) {
        const double cn = std::max(rep.lambdas1[n] * rep.lambdas1[n],
                                   rep.lambdas2[n] * rep.lambdas2[n]);
        REQUIRE(rep.c_n[n] == Catch::Approx(cn).epsilon(1e-14));
        REQUIRE(rep.bound_thm44[n] ==
                Catch::Approx(cn * C2 * (rep.lp1 + rep.lp2) * rep.l2_abs_deriv).epsilon(1e-13));
        REQUIRE(rep.bound_thm33[n] == Catch::Approx(cn * C2 * rep.ds).epsilon(1e-13));
        REQUIRE(rep.satisfied[n]);
        // consistency of the triviality flag with its definition
        const double tightest =
            std::min({rep.bound_thm44[n], rep.bound_thm33[n], rep.bound_lemma31[n],
                      rep.bound_measure[n]});
        REQUIRE(static_cast<bool>(rep.trivial_regime[n]) == (tightest > std::sqrt(cn)));
    }
}

TEST_CASE("full report symmetry under swapping the maps") {
    StabilityContext ctx;
    const auto a = full_report(identity_map(), perturbation_map(0.05, 3), 4.0, 3,
                               small_params(), &ctx);
    const auto b = full_report(perturbation_map(0.05, 3), identity_map(), 4.0, 3,
                               small_params(), &ctx);
    for (int n = 0; n < a.n_max; ++n) {
        REQUIRE(a.diffs[n] == b.diffs[n]);
        REQUIRE(a.bound_thm44[n] == b.bound_thm44[n]);
        REQUIRE(a.bound_thm33[n] == b.bound_thm33[n]);
        REQUIRE(a.bound_lemma31[n] == b.bound_lemma31[n]);
        REQUIRE(a.bound_measure[n] == b.bound_measure[n]);
    }
    REQUIRE(a.optB.B == b.optB.B);
}

TEST_CASE("full report satisfied for a perturbation pair, p = 4 and p = inf") {
    for (double p : {4.0, kInf}) {
        const auto rep =
            full_report(identity_map(), perturbation_map(0.05, 3), p, 5, small_params());
        REQUIRE(rep.n_max == 5);
        REQUIRE(rep.grid_max_flag == std::isinf(p));
        for (int n = 0; n < rep.n_max; ++n) {
            REQUIRE(rep.diffs[n] > 0.0);
            REQUIRE(rep.satisfied[n]);
        }
        REQUIRE(rep.cert1.member); // tau = max of the two seminorms
        REQUIRE(rep.cert2.member);
        REQUIRE(rep.B_ptau >= rep.B_lem32 * 0.0); // both reported, nonnegative
    }
    REQUIRE_THROWS_AS(full_report(identity_map(), identity_map(), 2.0, 3), InvalidParameter);
    REQUIRE_THROWS_AS(full_report(identity_map(), identity_map(), 4.0, 0), InvalidParameter);
}

TEST_CASE("context caching is transparent") {
    StabilityContext ctx;
    const auto a = full_report(identity_map(), scale_map(0.9), 3.0, 2, small_params(), &ctx);
    const auto b = full_report(identity_map(), scale_map(0.9), 3.0, 2, small_params(), &ctx);
    const auto c = full_report(identity_map(), scale_map(0.9), 3.0, 2, small_params());
    for (int n = 0; n < a.n_max; ++n) {
        REQUIRE(a.diffs[n] == b.diffs[n]);
        REQUIRE(a.diffs[n] == c.diffs[n]);
        REQUIRE(a.bound_thm44[n] == c.bound_thm44[n]);
    }
}
