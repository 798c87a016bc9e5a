#include "reserve/closed_form.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "reserve/numeric.hpp"

namespace reserve {

namespace {

constexpr int kRootIters = 200;

double root_residual_guard(double residual, double scale, const char* what) {
    if (std::fabs(residual) > 1e-12 * std::max(1.0, scale)) {
        std::ostringstream msg;
        msg << what << ": bisection residual " << residual << " above tolerance";
        throw std::runtime_error(msg.str());
    }
    return residual;
}

}  // namespace

double solve_uv_two(const ParametricSetting& setting) {
    setting.require_valid();
    const double mu = setting.mu, vbar = setting.vbar;
    auto g = [&](double x) { return x * (1.0 + std::log(vbar / x)) - mu; };
    const double root = bisect_increasing(g, 1e-15 * vbar, vbar, kRootIters);
    root_residual_guard(g(root), vbar, "solve_uv_two");
    return root;
}

std::optional<double> solve_uv_n(const ParametricSetting& setting) {
    setting.require_valid();
    if (setting.n < 3) throw std::invalid_argument("solve_uv_n: requires n >= 3");
    const double n = setting.n, mu = setting.mu, vbar = setting.vbar;
    const double c = n - 1.0 / (n - 1.0);
    const double target = (n - 1.0) * (n - 1.0) * mu;
    // The left side increases from 0 to c*vbar on (0, vbar]; beyond that the
    // equation has no root below vbar and the no-reserve case applies.
    if (c * vbar < target) return std::nullopt;
    auto g = [&](double x) { return x * (c + std::log(vbar / x)) - target; };
    const double root = bisect_increasing(g, 1e-15 * vbar, vbar, kRootIters);
    root_residual_guard(g(root), target, "solve_uv_n");
    return root;
}

EquilibriumSolution equilibrium_two(const ParametricSetting& setting) {
    if (setting.n != 2) throw std::invalid_argument("equilibrium_two: requires n = 2");
    const double vbar = setting.vbar;
    const double uv = solve_uv_two(setting);

    EquilibriumSolution sol;
    sol.setting = setting;
    sol.uv = uv;

    PiecewiseCdf f;
    f.domain_hi = vbar;
    if (uv > 0.0) f.segments.push_back({0.0, uv, Constant{0.0}});
    f.segments.push_back({uv, vbar, EqualRevenue{uv}});
    f.atoms.emplace_back(vbar, uv / vbar);
    sol.f_star = f;

    const double half_lambda = (1.0 - uv / vbar) / std::log(vbar / uv);
    PiecewiseCdf q;
    q.domain_hi = vbar;
    q.atoms.emplace_back(0.0, half_lambda);
    q.segments.push_back({0.0, uv, Constant{half_lambda}});
    q.segments.push_back({uv, vbar, TwoBidderRatio{uv, vbar}});
    sol.q_star = q;

    sol.lambda = 2.0 * half_lambda;
    sol.robust_revenue = 2.0 * uv - uv * uv / vbar;
    return sol;
}

EquilibriumSolution equilibrium_n(const ParametricSetting& setting) {
    if (setting.n < 3) throw std::invalid_argument("equilibrium_n: requires n >= 3");
    const double n = setting.n, mu = setting.mu, vbar = setting.vbar;
    const double m = (n - 1.0) * (n - 1.0);

    EquilibriumSolution sol;
    sol.setting = setting;

    const auto uv_opt = solve_uv_n(setting);
    if (uv_opt.has_value()) {
        const double uv = *uv_opt;
        const double v0 = uv / (n - 1.0);
        const double a = uv / m;
        sol.uv = uv;
        sol.v0 = v0;
        sol.a = a;

        PiecewiseCdf f;
        f.domain_hi = vbar;
        if (v0 > 0.0) f.segments.push_back({0.0, v0, Constant{0.0}});
        if (uv > v0) f.segments.push_back({v0, uv, Constant{1.0 - 1.0 / m}});
        if (vbar > uv) f.segments.push_back({uv, vbar, EqualRevenue{a}});
        f.atoms.emplace_back(v0, 1.0 - 1.0 / m);
        f.atoms.emplace_back(vbar, a / vbar);
        sol.f_star = f;

        const double c0 = n - 1.0 - 1.0 / (n - 1.0);
        const double denom = c0 + std::log(vbar / uv);
        const double k = powi(1.0 - a / vbar, setting.n - 1);
        const double q_flat = k * powi(m / (m - 1.0), setting.n - 1) * c0 / denom;
        PiecewiseCdf q;
        q.domain_hi = vbar;
        q.atoms.emplace_back(0.0, q_flat);
        if (uv > 0.0) q.segments.push_back({0.0, uv, Constant{q_flat}});
        if (vbar > uv) q.segments.push_back({uv, vbar, TruncLogRatio{setting.n, a, uv, vbar}});
        sol.q_star = q;

        sol.lambda = n * k / denom;
        sol.robust_revenue = vbar * (1.0 - powi(1.0 - a / vbar, setting.n));
        sol.boundary_case = false;
        return sol;
    }

    // No root below vbar: the optimal reserve is deterministically zero and
    // the worst case is binary on {v0, vbar}.
    const double v0 = mu - (vbar - mu) / (m - 1.0);
    sol.uv = vbar;
    sol.v0 = v0;
    sol.a = std::nullopt;
    sol.boundary_case = true;

    PiecewiseCdf f;
    f.domain_hi = vbar;
    if (v0 > 0.0) f.segments.push_back({0.0, v0, Constant{0.0}});
    f.segments.push_back({v0, vbar, Constant{1.0 - 1.0 / m}});
    f.atoms.emplace_back(v0, 1.0 - 1.0 / m);
    f.atoms.emplace_back(vbar, 1.0 / m);
    sol.f_star = f;

    PiecewiseCdf q;
    q.domain_hi = vbar;
    q.atoms.emplace_back(0.0, 1.0);
    q.segments.push_back({0.0, vbar, Constant{1.0}});
    sol.q_star = q;

    sol.lambda = n / (n - 1.0) * powi(1.0 - 1.0 / m, setting.n - 2);
    sol.robust_revenue =
        vbar * (1.0 - (1.0 - v0 / vbar) * (1.0 + 1.0 / (n - 1.0)) * powi(1.0 - 1.0 / m, setting.n - 1));
    return sol;
}

SingleBidderSolution single_mean_ub(const ParametricSetting& setting) {
    if (setting.n != 1) throw std::invalid_argument("single_mean_ub: requires n = 1");
    const double vbar = setting.vbar;
    const double uv = solve_uv_two(ParametricSetting{2, setting.mu, vbar});

    SingleBidderSolution sol;
    sol.mu = setting.mu;
    sol.vbar = vbar;
    sol.uv = uv;
    sol.lambda1 = 1.0 / std::log(vbar / uv);
    sol.lambda2 = 0.0;
    sol.robust_revenue = uv;

    PiecewiseCdf f;
    f.domain_hi = vbar;
    if (uv > 0.0) f.segments.push_back({0.0, uv, Constant{0.0}});
    f.segments.push_back({uv, vbar, EqualRevenue{uv}});
    f.atoms.emplace_back(vbar, uv / vbar);
    sol.f_star = f;

    PiecewiseCdf q;
    q.domain_hi = vbar;
    if (uv > 0.0) q.segments.push_back({0.0, uv, Constant{0.0}});
    q.segments.push_back({uv, vbar, LogUniform{uv, vbar}});
    sol.q_star = q;
    return sol;
}

SingleBidderSolution single_two_moment(double mu, double mu2, std::optional<double> vbar_opt,
                                       std::optional<double> lambda2_opt) {
    if (!(mu > 0.0)) throw std::invalid_argument("single_two_moment: mu must be positive");
    if (mu2 <= mu * mu) {
        throw std::domain_error("single_two_moment: infeasible, mu2 <= mu^2");
    }

    double uv = 0.0, vbar = 0.0, lambda2 = 0.0;
    if (vbar_opt.has_value()) {
        vbar = *vbar_opt;
        if (!(mu < vbar)) throw std::invalid_argument("single_two_moment: need mu < vbar");
        uv = solve_uv_two(ParametricSetting{2, mu, vbar});
        const double implied_mu2 = 2.0 * vbar * uv - uv * uv;
        if (std::fabs(implied_mu2 - mu2) > 1e-9 * std::max(1.0, implied_mu2)) {
            std::ostringstream msg;
            msg << "single_two_moment: mu2 must equal 2 vbar uv - uv^2 = " << implied_mu2
                << " for this (mu, vbar), got " << mu2;
            throw std::domain_error(msg.str());
        }
        lambda2 = lambda2_opt.value_or(0.0);
    } else {
        // Nested solve: vbar(uv) = (mu2 + uv^2)/(2 uv) restores the second
        // moment, then bisect uv on the mean equation. The candidate range is
        // (0, sqrt(mu2)), where vbar(uv) > uv.
        auto vbar_of = [&](double x) { return (mu2 + x * x) / (2.0 * x); };
        auto g = [&](double x) { return x * (1.0 + std::log(vbar_of(x) / x)) - mu; };
        const double hi = std::sqrt(mu2);
        uv = bisect_increasing(g, 1e-15 * hi, hi, kRootIters);
        if (std::fabs(g(uv)) > 1e-10 * std::max(1.0, mu)) {
            throw std::domain_error(
                "single_two_moment: no (uv, vbar) solves the two-moment system");
        }
        vbar = vbar_of(uv);
        lambda2 = 1.0 / (2.0 * ((vbar - uv) - vbar * std::log(vbar / uv)));
        if (lambda2_opt.has_value() &&
            std::fabs(*lambda2_opt - lambda2) > 1e-9 * std::fabs(lambda2)) {
            throw std::invalid_argument(
                "single_two_moment: lambda2 is determined in the no-vbar mode");
        }
    }

    const double lambda1 = (1.0 - 2.0 * lambda2 * (vbar - uv)) / std::log(vbar / uv);
    // Monotonicity of the price CDF requires lambda1 >= -2 r lambda2 on
    // [uv, vbar]; the binding endpoint depends on the sign of lambda2.
    const double r_bind = lambda2 >= 0.0 ? uv : vbar;
    if (lambda1 + 2.0 * r_bind * lambda2 < -1e-12) {
        std::ostringstream msg;
        msg << "single_two_moment: lambda2 outside the monotone family, "
            << "lambda1 >= -2 r lambda2 fails at r = " << r_bind;
        throw std::domain_error(msg.str());
    }

    SingleBidderSolution sol;
    sol.mu = mu;
    sol.mu2 = mu2;
    sol.vbar = vbar_opt;
    sol.uv = uv;
    sol.lambda1 = lambda1;
    sol.lambda2 = lambda2;
    sol.robust_revenue = uv;

    PiecewiseCdf f;
    f.domain_hi = vbar;
    if (uv > 0.0) f.segments.push_back({0.0, uv, Constant{0.0}});
    f.segments.push_back({uv, vbar, EqualRevenue{uv}});
    f.atoms.emplace_back(vbar, uv / vbar);
    sol.f_star = f;

    PiecewiseCdf q;
    q.domain_hi = vbar;
    if (uv > 0.0) q.segments.push_back({0.0, uv, Constant{0.0}});
    q.segments.push_back({uv, vbar, AffineLog{lambda1, lambda2, uv}});
    sol.q_star = q;
    return sol;
}

EquilibriumSolution to_equilibrium(const SingleBidderSolution& sol) {
    EquilibriumSolution eq;
    eq.setting = ParametricSetting{1, sol.mu, sol.vbar.value_or(sol.q_star.domain_hi)};
    eq.f_star = sol.f_star;
    eq.q_star = sol.q_star;
    eq.uv = sol.uv;
    eq.lambda = sol.lambda1;
    eq.robust_revenue = sol.robust_revenue;
    return eq;
}

EquilibriumSolution solve_equilibrium(const ParametricSetting& setting) {
    setting.require_valid();
    if (setting.n == 1) return to_equilibrium(single_mean_ub(setting));
    if (setting.n == 2) return equilibrium_two(setting);
    return equilibrium_n(setting);
}

}  // namespace reserve
