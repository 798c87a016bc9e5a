#include "reserve/discrete.hpp"

#include <cmath>
#include <stdexcept>

#include "reserve/closed_form.hpp"
#include "reserve/numeric.hpp"

namespace reserve {

double discrete_mean(const DiscreteEquilibrium& eq) {
    KahanSum acc;
    if (eq.alpha.has_value()) {
        for (int i = 0; i < eq.k; ++i) acc.add(eq.grid[i] * (1.0 - eq.x[i]));
        return eq.grid[0] + (*eq.alpha - 1.0) * acc.value();
    }
    const double delta = eq.grid[eq.k] / eq.k;
    for (int i = 0; i < eq.k; ++i) acc.add(1.0 - eq.x[i]);
    return delta * acc.value();
}

double nature_step(double delta, double r, double x, int n) {
    if (!(delta > 0.0) || r < 0.0) throw std::invalid_argument("nature_step: need delta > 0, r >= 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double xn1 = powi(x, n - 1);
    const double xn = xn1 * x;
    return std::pow(n / (r + delta) * (xn1 - xn) * delta + xn, 1.0 / n);
}

double seller_step(double delta, double r, double q, double x, double lambda, int n) {
    if (r <= 0.0 || x <= 0.0) {
        throw std::domain_error("seller_step: undefined at r = 0 or x = 0");
    }
    const double num = lambda / n - q * (n - 1.0) * powi(x, n - 2) * (1.0 - x);
    return q - num / (r * powi(x, n - 1)) * delta;
}

namespace {

// Forward pass of the two-bidder adversary recursion from log(x_1) = l1. The
// recursion below the worst-case support squares the state each step, so the
// start value is representable only in log space; it is carried there until
// x clears 1e-18 and the recursion continues in linear arithmetic.
void nature_forward(double l1, int k, double vbar, Eigen::ArrayXd& x, Eigen::ArrayXd& log_x) {
    const double delta = vbar / k;
    const double kLogLin = std::log(1e-18);
    double l = l1;
    bool linear = false;
    double xv = 0.0;
    for (int i = 0; i < k; ++i) {
        const double r_prev = i * delta;  // r_{k,i} for the step to i+1
        if (!linear) {
            xv = l > -745.0 ? std::exp(l) : 0.0;
            x[i] = xv;
            log_x[i] = l;
            if (l > kLogLin) {
                linear = true;
            } else {
                // x' = sqrt(c x (1 - x + x/c)) with c = 2 delta/(r+delta)
                const double c = 2.0 * delta / (r_prev + delta);
                l = 0.5 * (std::log(c) + l + std::log1p(xv * (1.0 / c - 1.0)));
                continue;
            }
        } else {
            x[i] = xv;
            log_x[i] = std::log(xv);
        }
        if (i + 1 < k) {
            const double c = 2.0 * delta / (r_prev + delta);
            xv = std::sqrt(c * (xv - xv * xv) + xv * xv);
        }
    }
}

double nature_mean(double l1, int k, double vbar, Eigen::ArrayXd& x, Eigen::ArrayXd& log_x) {
    nature_forward(l1, k, vbar, x, log_x);
    KahanSum acc;
    for (int i = 0; i < k; ++i) acc.add(1.0 - x[i]);
    return vbar / k * acc.value();
}

// Seller CDF run forward (the contracting direction) from the base relation
// q_1 = (lambda/2)/(1 - x_1). Written with s_i = r_i x_i / delta so the
// update stays finite when x underflows: q_i = (q_{i-1} s_i + L)/(s_i + 1 - x_i).
void seller_forward(double half_lambda, const Eigen::ArrayXd& x, double vbar, Eigen::ArrayXd& q) {
    const int k = static_cast<int>(x.size());
    const double delta = vbar / k;
    q[0] = half_lambda / (1.0 - x[0]);
    for (int i = 1; i < k; ++i) {
        const double r = i * delta;  // r_{k,i+1}
        const double s = r * x[i] / delta;
        q[i] = (q[i - 1] * s + half_lambda) / (s + 1.0 - x[i]);
    }
}

}  // namespace

DiscreteEquilibrium solve_discrete_two(const ParametricSetting& setting, int k) {
    setting.require_valid();
    if (setting.n != 2) throw std::invalid_argument("solve_discrete_two: requires n = 2");
    if (k <= 1) throw std::invalid_argument("solve_discrete_two: requires k > 1");
    const double vbar = setting.vbar, mu = setting.mu;

    DiscreteEquilibrium eq;
    eq.k = k;
    eq.grid = Eigen::ArrayXd::LinSpaced(k + 1, 0.0, vbar);
    eq.x = Eigen::ArrayXd::Zero(k);
    eq.q = Eigen::ArrayXd::Zero(k);
    eq.log_x = Eigen::ArrayXd::Zero(k);

    // Mean is continuous and strictly decreasing in the start value, so the
    // constraint is bisected in log space where the root is representable.
    double lo = -1e30, hi = 0.0;
    if (!(nature_mean(lo, k, vbar, eq.x, eq.log_x) > mu)) {
        throw std::runtime_error("solve_discrete_two: mean bracket failure at lower end");
    }
    for (int it = 0; it < 500; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (nature_mean(mid, k, vbar, eq.x, eq.log_x) > mu)
            lo = mid;
        else
            hi = mid;
    }
    // Leave the state at the better endpoint.
    const double m_lo = nature_mean(lo, k, vbar, eq.x, eq.log_x);
    const double m_hi = nature_mean(hi, k, vbar, eq.x, eq.log_x);
    nature_mean(std::fabs(m_lo - mu) < std::fabs(m_hi - mu) ? lo : hi, k, vbar, eq.x, eq.log_x);

    // Multiplier bisection: q_k(lambda) is strictly increasing with
    // q_k(0) < 1 < q_k(2).
    double llo = 0.0, lhi = 2.0;
    for (int it = 0; it < 300; ++it) {
        const double lam = 0.5 * (llo + lhi);
        if (lam <= llo || lam >= lhi) break;
        seller_forward(0.5 * lam, eq.x, vbar, eq.q);
        if (eq.q[k - 1] < 1.0)
            llo = lam;
        else
            lhi = lam;
    }
    eq.lambda = 0.5 * (llo + lhi);
    seller_forward(0.5 * eq.lambda, eq.x, vbar, eq.q);
    // Pin the top value; the bisection leaves it within one ulp of 1.
    if (std::fabs(eq.q[k - 1] - 1.0) > 1e-12) {
        throw std::runtime_error("solve_discrete_two: multiplier bisection failed to reach q_k = 1");
    }
    eq.q[k - 1] = 1.0;
    return eq;
}

DiscreteEquilibrium solve_discrete_single(double mu, double vbar, double uv, int k) {
    if (!(0.0 < uv && uv < mu && mu < vbar)) {
        throw std::invalid_argument("solve_discrete_single: need 0 < uv < mu < vbar");
    }
    if (k < 1) throw std::invalid_argument("solve_discrete_single: requires k >= 1");
    const double alpha = std::pow(vbar / uv, 1.0 / k);

    DiscreteEquilibrium eq;
    eq.k = k;
    eq.alpha = alpha;
    eq.grid = Eigen::ArrayXd(k + 1);
    eq.x = Eigen::ArrayXd(k);
    eq.q = Eigen::ArrayXd(k);
    eq.log_x = Eigen::ArrayXd(k);
    for (int i = 0; i <= k; ++i) eq.grid[i] = uv * std::pow(alpha, i);
    eq.grid[k] = vbar;
    const double spread = k * (alpha - 1.0);
    for (int i = 0; i < k; ++i) {
        eq.x[i] = 1.0 - (mu - uv) / (eq.grid[i] * spread);
        eq.log_x[i] = std::log(eq.x[i]);
        eq.q[i] = static_cast<double>(i + 1) / k;
    }
    eq.lambda = 1.0 / spread;
    return eq;
}

std::vector<ConvergenceRow> convergence_study(const ParametricSetting& setting,
                                              const std::vector<int>& ks) {
    if (setting.n != 2) throw std::invalid_argument("convergence_study: requires n = 2");
    const EquilibriumSolution sol = equilibrium_two(setting);
    const double eps = 0.01 * setting.vbar;

    std::vector<ConvergenceRow> rows;
    rows.reserve(ks.size());
    for (int k : ks) {
        const DiscreteEquilibrium eq = solve_discrete_two(setting, k);
        ConvergenceRow row;
        row.k = k;
        for (int i = 0; i < k; ++i) {
            const double r = eq.grid[i];
            row.dist_f = std::max(row.dist_f, std::fabs(eq.x[i] - cdf_eval(sol.f_star, r)));
            if (r >= sol.uv + eps) {
                row.dist_q = std::max(row.dist_q, std::fabs(eq.q[i] - cdf_eval(sol.q_star, r)));
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace reserve
