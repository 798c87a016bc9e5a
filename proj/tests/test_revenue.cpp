#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "reserve/closed_form.hpp"
#include "reserve/revenue.hpp"

using namespace reserve;

TEST_CASE("fixed-reserve revenue on basic cases") {
    CHECK(rev_fixed_reserve(point_mass(0.4), 0.0, 2) == doctest::Approx(0.4).epsilon(1e-14));

    const EquilibriumSolution sol = equilibrium_two({2, 0.3, 1.0});
    const double constant = 2.0 * sol.uv - sol.uv * sol.uv;
    const RevenueEvaluator ev(sol.f_star, 2);
    for (double r : {0.0, sol.uv / 2.0, sol.uv, 0.5, 0.9}) {
        CHECK(ev.rev(r) == doctest::Approx(constant).epsilon(1e-12));
    }

    const EquilibriumSolution fig4 = equilibrium_n({3, 2.0 / 3.0, 1.0});
    CHECK(rev_fixed_reserve(fig4.f_star, 0.0, 3) == doctest::Approx(0.625).epsilon(1e-13));

    CHECK_THROWS_AS(rev_fixed_reserve(sol.f_star, -0.1, 2), std::invalid_argument);
}

TEST_CASE("two-bidder seller indifference at 1e-9 over a dense reserve grid") {
    const EquilibriumSolution sol = equilibrium_two({2, 0.3, 1.0});
    const double constant = 2.0 * sol.uv - sol.uv * sol.uv;
    const RevenueEvaluator ev(sol.f_star, 2);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double r = static_cast<double>(i) / 1000;
        worst = std::max(worst, std::fabs(ev.rev(r) - constant));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("n >= 3 revenue profile: constant where claimed, no better between") {
    const EquilibriumSolution sol = equilibrium_n({3, 0.3, 1.0});
    const double constant = robust_revenue_formula(sol);
    const RevenueEvaluator ev(sol.f_star, 3);
    CHECK(ev.rev(0.0) == doctest::Approx(constant).epsilon(1e-12));
    for (int i = 0; i < 400; ++i) {
        const double r = sol.uv + (1.0 - sol.uv) * i / 400;
        CHECK(std::fabs(ev.rev(r) - constant) < 1e-9);
    }
    for (int i = 1; i < 400; ++i) {
        const double r = *sol.v0 + (sol.uv - *sol.v0) * i / 400;
        CHECK(ev.rev(r) <= constant + 1e-9);
    }
}

TEST_CASE("randomized-reserve revenue") {
    const EquilibriumSolution sol = equilibrium_two({2, 0.3, 1.0});
    // A degenerate reserve distribution reproduces the fixed-reserve value.
    for (double r : {0.0, 0.2, 0.7}) {
        CHECK(rev_randomized(sol.f_star, point_mass(r), 2) ==
              doctest::Approx(rev_fixed_reserve(sol.f_star, r, 2)).epsilon(1e-12));
    }
    CHECK(rev_randomized(sol.f_star, sol.q_star, 2) ==
          doctest::Approx(sol.robust_revenue).epsilon(1e-10));

    const SingleBidderSolution single = single_mean_ub({1, 0.3, 1.0});
    const double rev = rev_randomized(single.f_star, single.q_star, 1);
    CHECK(rev == doctest::Approx(single.uv).epsilon(1e-10));
    // Quadrature cross-check of int r (1-F) dQ with the plain Simpson rule.
    const double uv = single.uv;
    const double direct = oracles::simpson(
        [&](double r) { return r * (uv / r) / (r * std::log(1.0 / uv)); }, uv, 1.0, 4000);
    CHECK(rev == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("objective identity Rev - lambda mu") {
    const EquilibriumSolution sol = equilibrium_two({2, 0.3, 1.0});
    const double rev = rev_randomized(sol.f_star, sol.q_star, 2);
    for (double lam : {0.0, 0.3, sol.lambda, 2.0}) {
        CHECK(lagrangian(sol.q_star, sol.f_star, lam, 2) ==
              doctest::Approx(rev - lam * 0.3).epsilon(1e-12));
    }
    CHECK(sol.lambda == doctest::Approx(2.0 * (1.0 - sol.uv) / std::log(1.0 / sol.uv)).epsilon(1e-14));
}

TEST_CASE("objective identity holds for random step distributions") {
    std::mt19937_64 gen(5150);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        Eigen::ArrayXd grid(3), vals(3);
        grid << 0.1 + 0.2 * unif(gen), 0.4 + 0.2 * unif(gen), 0.7 + 0.2 * unif(gen);
        const double a = 0.3 * unif(gen), b = 0.3 * unif(gen), c = 0.3 * unif(gen);
        vals << a, a + b, a + b + c;
        const PiecewiseCdf f = step_cdf(grid, vals, 1.0);
        const PiecewiseCdf q = point_mass(unif(gen) * 0.8);
        const int n = 1 + rep % 4;
        const double lam = unif(gen);
        const double lhs = lagrangian(q, f, lam, n);
        const double rhs = rev_randomized(f, q, n) - lam * moment(f, 1);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        // Revenue never beats the support bound, at any reserve.
        const RevenueEvaluator ev(f, n);
        for (int i = 0; i < 50; ++i) {
            CHECK(ev.rev(i / 50.0) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("pointwise objective h_v") {
    const EquilibriumSolution sol = equilibrium_two({2, 0.3, 1.0});
    const double uv = sol.uv, lam = sol.lambda;

    // Flat region: h = Q(v)(1-z)^2 - lambda (1-z), no density term.
    const double v_flat = uv / 2.0;
    const double qv = cdf_eval(sol.q_star, v_flat);
    for (double z : {0.0, 0.3, 0.8, 1.0}) {
        CHECK(integrand_h(sol.q_star, lam, v_flat, z, 2) ==
              doctest::Approx(qv * (1.0 - z) * (1.0 - z) - lam * (1.0 - z)).epsilon(1e-13));
    }
    // And its minimum over [0,1] sits at z = 0 (the equilibrium value there).
    double best = 1e9, best_z = -1.0;
    for (int i = 0; i <= 400; ++i) {
        const double z = i / 400.0;
        const double h = integrand_h(sol.q_star, lam, v_flat, z, 2);
        if (h < best) {
            best = h;
            best_z = z;
        }
    }
    CHECK(best_z == 0.0);

    // Stationarity at z = 1 - uv/v inside the support.
    const double v = 0.5;
    const double z_star = 1.0 - uv / v;
    const double h = 1e-6;
    const double slope = (integrand_h(sol.q_star, lam, v, z_star + h, 2) -
                          integrand_h(sol.q_star, lam, v, z_star - h, 2)) /
                         (2.0 * h);
    CHECK(std::fabs(slope) < 1e-7);

    CHECK(integrand_h(sol.q_star, lam, v, 1.0, 2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_THROWS_AS(integrand_h(sol.q_star, lam, 0.0, 0.5, 2), std::domain_error);
}

TEST_CASE("closed-form robust revenue agrees with the randomized integral") {
    CHECK(robust_revenue_formula(equilibrium_n({3, 2.0 / 3.0, 1.0})) ==
          doctest::Approx(0.625).epsilon(1e-15));
    CHECK(robust_revenue_formula(single_mean_ub({1, 2.0 / M_E, 1.0})) ==
          doctest::Approx(1.0 / M_E).epsilon(1e-13));
    CHECK(robust_revenue_formula(equilibrium_two({2, 2.0 / M_E, 1.0})) ==
          doctest::Approx(2.0 / M_E - 1.0 / (M_E * M_E)).epsilon(1e-14));

    for (const ParametricSetting s : {ParametricSetting{2, 0.3, 1.0}, ParametricSetting{3, 0.3, 1.0},
                                      ParametricSetting{3, 2.0 / 3.0, 1.0},
                                      ParametricSetting{5, 0.12, 1.0}}) {
        const EquilibriumSolution sol = solve_equilibrium(s);
        CHECK(rev_randomized(sol.f_star, sol.q_star, s.n) ==
              doctest::Approx(robust_revenue_formula(sol)).epsilon(1e-9));
    }
}
