#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "reserve/closed_form.hpp"
#include "reserve/discrete.hpp"

using namespace reserve;

namespace {

// Largest residual of the saddle-point relations in denominator-cleared form:
//   forward:  x_{i+1}^2 - c_i (x_i - x_i^2) - x_i^2           (c_i = 2 delta/(r_i + delta))
//   seller:   (q_i - q_{i-1}) r_i x_i / delta - lambda/2 + q_i (1 - x_i)
//   base:     q_1 (1 - x_1) - lambda/2
struct Residuals {
    double forward = 0.0;
    double seller = 0.0;
    double base = 0.0;
};

Residuals relation_residuals(const DiscreteEquilibrium& eq) {
    Residuals res;
    const double delta = eq.grid[eq.k] / eq.k;
    for (int i = 0; i + 1 < eq.k; ++i) {
        const double c = 2.0 * delta / (eq.grid[i] + delta);
        const double lhs = eq.x[i + 1] * eq.x[i + 1];
        const double rhs = c * (eq.x[i] - eq.x[i] * eq.x[i]) + eq.x[i] * eq.x[i];
        res.forward = std::max(res.forward, std::fabs(lhs - rhs));
    }
    for (int i = 1; i < eq.k; ++i) {
        const double s = eq.grid[i] * eq.x[i] / delta;
        const double r =
            (eq.q[i] - eq.q[i - 1]) * s - 0.5 * eq.lambda + eq.q[i] * (1.0 - eq.x[i]);
        res.seller = std::max(res.seller, std::fabs(r));
    }
    res.base = std::fabs(eq.q[0] * (1.0 - eq.x[0]) - 0.5 * eq.lambda);
    return res;
}

double discrete_objective(const DiscreteEquilibrium& eq) {
    const double delta = eq.grid[eq.k] / eq.k;
    double acc = 0.0;
    for (int i = 0; i < eq.k; ++i) {
        const double qprev = i > 0 ? eq.q[i - 1] : 0.0;
        acc += (eq.q[i] - qprev) * eq.grid[i] * (1.0 - eq.x[i] * eq.x[i]);
        acc += delta * eq.q[i] * (1.0 - eq.x[i]) * (1.0 - eq.x[i]);
        acc -= delta * eq.lambda * (1.0 - eq.x[i]);
    }
    return acc;
}

}  // namespace

TEST_CASE("recursion steps") {
    CHECK(nature_step(0.5, 0.0, 0.0, 2) == 0.0);
    CHECK(nature_step(0.5, 0.0, 1.0, 2) == 1.0);
    // k = 2 game: x2 = sqrt(2 x1 - x1^2) at the origin grid point.
    const double x1 = 1.2 - std::sqrt(0.46);
    CHECK(nature_step(0.5, 0.0, x1, 2) ==
          doctest::Approx(std::sqrt(2.0 * x1 - x1 * x1)).epsilon(1e-15));
    CHECK(nature_step(0.5, 0.0, x1, 2) == doctest::Approx(0.8782329983125268).epsilon(1e-12));

    // The forward step has slope (1-x)/r in the grid spacing for every n,
    // matching the continuum derivative of the worst-case CDF.
    for (int n : {2, 3, 5}) {
        const double r = 0.4, x = 0.55;
        const double slope = (nature_step(1e-8, r, x, n) - x) / 1e-8;
        CHECK(slope == doctest::Approx((1.0 - x) / r).epsilon(1e-5));
    }

    // Zero-step fixed point: the numerator of the seller step vanishes.
    const double q = 0.63, x = 0.4;
    for (int n : {2, 3, 5}) {
        const double lam = n * q * (n - 1.0) * std::pow(x, n - 2.0) * (1.0 - x);
        CHECK(seller_step(0.01, 0.5, q, x, lam, n) == doctest::Approx(q).epsilon(1e-14));
    }

    // Hand-solved k = 2 values: q1 from q2 = 1.
    const double x2 = 1.4 - x1;
    const double lam = 2.0 * (1.0 - x1) / (1.0 - x1 + x2);
    CHECK(seller_step(0.5, 0.5, 1.0, x2, lam, 2) ==
          doctest::Approx(0.7372097807744856).epsilon(1e-12));

    // Continuity in delta.
    CHECK(seller_step(1e-12, 0.5, 0.8, 0.6, 0.7, 2) == doctest::Approx(0.8).epsilon(1e-10));
    CHECK_THROWS_AS(seller_step(0.5, 0.0, 1.0, 0.5, 0.7, 2), std::domain_error);
    CHECK_THROWS_AS(seller_step(0.5, 0.5, 1.0, 0.0, 0.7, 2), std::domain_error);
}

TEST_CASE("k = 2 solver matches the hand-derived quadratic") {
    const DiscreteEquilibrium eq = solve_discrete_two({2, 0.3, 1.0}, 2);
    // By hand: x1^2 - 2.4 x1 + 0.98 = 0, x2 = 1.4 - x1, lambda from the
    // linear base relation.
    const double x1 = 1.2 - std::sqrt(0.46);
    const double x2 = 1.4 - x1;
    const double lam = 2.0 * (1.0 - x1) / (1.0 - x1 + x2);
    CHECK(eq.x[0] == doctest::Approx(x1).epsilon(1e-12));
    CHECK(eq.x[1] == doctest::Approx(x2).epsilon(1e-12));
    CHECK(eq.q[0] == doctest::Approx(lam / (2.0 * (1.0 - x1))).epsilon(1e-12));
    CHECK(eq.q[1] == 1.0);
    CHECK(eq.lambda == doctest::Approx(lam).epsilon(1e-12));
}

TEST_CASE("saddle-point relations hold at 1e-12 for k in {10, 100, 1000}") {
    for (int k : {10, 100, 1000}) {
        const DiscreteEquilibrium eq = solve_discrete_two({2, 0.3, 1.0}, k);
        CHECK(std::fabs(discrete_mean(eq) - 0.3) < 1e-12);
        const Residuals res = relation_residuals(eq);
        CHECK(res.forward < 1e-12);
        CHECK(res.seller < 1e-12);
        CHECK(res.base < 1e-12);
        CHECK(eq.q[eq.k - 1] == 1.0);

        // Interior and monotone: the start value can underflow in linear
        // representation, but its log stays finite.
        CHECK(eq.log_x[0] > -std::numeric_limits<double>::infinity());
        CHECK(eq.x[eq.k - 1] < 1.0);
        CHECK(eq.q[0] > 0.0);
        for (int i = 0; i + 1 < eq.k; ++i) {
            CHECK(eq.x[i + 1] >= eq.x[i]);
            CHECK(eq.q[i + 1] >= eq.q[i] - 1e-15);
        }

        // Second-order condition: (q_i - q_{i-1}) r_i <= q_i vbar / k.
        const double delta = eq.grid[eq.k] / eq.k;
        for (int i = 0; i < eq.k; ++i) {
            const double qprev = i > 0 ? eq.q[i - 1] : 0.0;
            CHECK((eq.q[i] - qprev) * eq.grid[i] <= eq.q[i] * delta + 1e-15);
        }
    }
}

TEST_CASE("single-coordinate perturbations cannot improve the adversary") {
    const DiscreteEquilibrium eq = solve_discrete_two({2, 0.3, 1.0}, 100);
    const double base = discrete_objective(eq);
    // Rebalance through a partner coordinate so the mean stays fixed.
    int partner = -1;
    for (int j = 0; j < eq.k; ++j) {
        if (eq.x[j] > 1e-3 && eq.x[j] < 1.0 - 1e-3) partner = j;
    }
    REQUIRE(partner >= 0);
    for (int i = 0; i < eq.k; i += 7) {
        if (i == partner) continue;
        for (double step : {1e-4, -1e-4}) {
            DiscreteEquilibrium pert = eq;
            pert.x[i] += step;
            pert.x[partner] -= step;
            if (pert.x[i] < 0.0 || pert.x[i] > 1.0 || pert.x[partner] < 0.0 ||
                pert.x[partner] > 1.0) {
                continue;
            }
            CHECK(discrete_objective(pert) >= base - 1e-8);
        }
    }
}

TEST_CASE("single-bidder geometric-grid solution") {
    const double mu = 0.3, vbar = 1.0;
    const double uv = oracles::uv_mean_bound(mu, vbar);

    const DiscreteEquilibrium k4 = solve_discrete_single(mu, vbar, uv, 4);
    CHECK(k4.q[0] == doctest::Approx(0.25));
    CHECK(k4.q[1] == doctest::Approx(0.5));
    CHECK(k4.q[2] == doctest::Approx(0.75));
    CHECK(k4.q[3] == doctest::Approx(1.0));
    const double alpha = std::pow(vbar / uv, 0.25);
    CHECK(k4.x[0] == doctest::Approx(1.0 - (mu - uv) / (4.0 * uv * (alpha - 1.0))).epsilon(1e-13));
    CHECK(std::fabs(discrete_mean(k4) - mu) < 1e-12);
    for (int i = 0; i + 1 < 4; ++i) CHECK(k4.x[i + 1] >= k4.x[i]);

    // Fine grids approach the continuum CDF at the geometric midpoint.
    const DiscreteEquilibrium fine = solve_discrete_single(mu, vbar, uv, 10000);
    const double r_mid = std::sqrt(uv * vbar);
    const double limit = 1.0 - (mu - uv) / (r_mid * std::log(vbar / uv));
    CHECK(std::fabs(fine.x[5000] - limit) < 1e-3);
    CHECK(limit == doctest::Approx(0.7046541515318728).epsilon(1e-12));
}

TEST_CASE("discrete equilibria approach the closed forms") {
    const ParametricSetting s{2, 0.3, 1.0};
    const auto rows = convergence_study(s, {10, 100, 1000});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].dist_f > rows[1].dist_f);
    CHECK(rows[1].dist_f > rows[2].dist_f);
    CHECK(rows[0].dist_q > rows[1].dist_q);
    CHECK(rows[1].dist_q > rows[2].dist_q);
    CHECK(rows[2].dist_f * 5.0 <= rows[0].dist_f);
    CHECK(rows[2].dist_q * 5.0 <= rows[0].dist_q);
    CHECK(rows[2].dist_f < 0.02);

    const auto again = convergence_study(s, {100, 100});
    CHECK(again[0].dist_f == again[1].dist_f);
    CHECK(again[0].dist_q == again[1].dist_q);
}
