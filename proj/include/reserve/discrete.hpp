#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "reserve/setting.hpp"

namespace reserve {

/// Saddle point of the discretized game on a (k+1)-point grid. `x` holds the
/// adversary CDF values and `q` the seller CDF values at grid[0..k-1];
/// grid[k] is the top point where both CDFs reach 1. `log_x` carries log(x)
/// exactly even where x underflows to zero (the adversary CDF decays
/// double-exponentially below the worst-case support).
struct DiscreteEquilibrium {
    int k = 0;
    Eigen::ArrayXd grid;    // size k+1
    Eigen::ArrayXd x;       // size k, adversary CDF at grid[0..k-1]
    Eigen::ArrayXd q;       // size k, seller CDF at grid[0..k-1]
    Eigen::ArrayXd log_x;   // size k
    double lambda = 0.0;
    std::optional<double> alpha;  // geometric grid ratio (single-bidder mode)
};

/// Mean of the adversary step CDF: (vbar/k) sum (1-x_i) on the uniform grid,
/// uv + (alpha-1) sum r_i (1-x_i) on the geometric grid.
double discrete_mean(const DiscreteEquilibrium& eq);

/// Forward step of the adversary recursion:
/// x' = (n/(r+delta) (x^{n-1} - x^n) delta + x^n)^{1/n}. Fixes 0 -> 0, 1 -> 1.
double nature_step(double delta, double r, double x, int n);

/// Backward step of the seller recursion:
/// q_{i-1} = q - (lambda/n - q (n-1) x^{n-2} (1-x)) / (r x^{n-1}) * delta.
/// Throws std::domain_error at r = 0 or x = 0 where it is undefined.
double seller_step(double delta, double r, double q, double x, double lambda, int n);

/// Two-bidder discretized saddle point by double bisection: the adversary
/// start value is bisected in log space until the mean constraint holds, then
/// the multiplier is bisected until the seller recursion run forward from
/// q_1 = (lambda/2)/(1 - x_1) reaches q_k = 1. The recursion relations hold
/// in denominator-cleared form with residuals below 1e-12.
DiscreteEquilibrium solve_discrete_two(const ParametricSetting& setting, int k);

/// Single-bidder geometric-grid solution in closed form:
/// r_i = alpha^{i-1} uv with alpha = (vbar/uv)^{1/k},
/// x_i = 1 - (mu-uv)/(k r_i (alpha-1)), q_i = i/k.
DiscreteEquilibrium solve_discrete_single(double mu, double vbar, double uv, int k);

struct ConvergenceRow {
    int k = 0;
    double dist_f = 0.0;  // sup over grid points of |x_i - F*(r_i)|
    double dist_q = 0.0;  // sup over grid points in [uv + 0.01 vbar, vbar] of |q_i - Q*(r_i)|
};

/// Distances between the discretized and closed-form equilibria for each k
/// (two bidders only).
std::vector<ConvergenceRow> convergence_study(const ParametricSetting& setting,
                                              const std::vector<int>& ks);

}  // namespace reserve
