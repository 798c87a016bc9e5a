#pragma once

#include <optional>

#include "reserve/distribution.hpp"
#include "reserve/setting.hpp"

namespace reserve {

/// Solved saddle point: worst-case value distribution F*, reserve price
/// distribution Q*, and the defining scalars.
struct EquilibriumSolution {
    ParametricSetting setting;
    PiecewiseCdf f_star;
    PiecewiseCdf q_star;
    double uv = 0.0;                // lower support endpoint of the worst case
    std::optional<double> v0;      // low atom location (n >= 3)
    std::optional<double> a;       // equal-revenue coefficient (n >= 3)
    double lambda = 0.0;           // multiplier of the mean constraint
    double robust_revenue = 0.0;
    bool boundary_case = false;    // n >= 3 with no interior root: no reserve
};

/// Single-bidder pricing solutions (mean+bound, or two-moment variants).
struct SingleBidderSolution {
    double mu = 0.0;
    std::optional<double> mu2;
    std::optional<double> vbar;
    double uv = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    PiecewiseCdf f_star;
    PiecewiseCdf q_star;
    double robust_revenue = 0.0;  // equals uv
};

/// Root of x (1 + log(vbar/x)) = mu on (0, vbar]; the map is strictly
/// increasing there so bisection applies. Residual below 1e-12.
/// Used for n = 2 and the single-bidder case.
double solve_uv_two(const ParametricSetting& setting);

/// Root of x (n - 1/(n-1) + log(vbar/x)) = (n-1)^2 mu on (0, vbar] for
/// n >= 3, or nullopt when (n - 1/(n-1)) vbar < (n-1)^2 mu and no root
/// exists there (the no-reserve case).
std::optional<double> solve_uv_n(const ParametricSetting& setting);

/// Two-bidder equilibrium: equal-revenue worst case with an atom at vbar,
/// reserve distribution with an atom at zero and a ratio-form rise on
/// (uv, vbar]; constant seller revenue 2 uv - uv^2/vbar.
EquilibriumSolution equilibrium_two(const ParametricSetting& setting);

/// n >= 3 equilibrium, interior or boundary case depending on solve_uv_n.
EquilibriumSolution equilibrium_n(const ParametricSetting& setting);

/// Single bidder, known mean and upper bound: log-uniform price distribution,
/// equal-revenue worst case, guaranteed revenue uv.
SingleBidderSolution single_mean_ub(const ParametricSetting& setting);

/// Single bidder with a second-moment bound.
///
/// With `vbar` given (family mode): mu2 must equal 2 vbar uv - uv^2 for the
/// uv solving the mean equation; `lambda2` selects a member of the price
/// family (default 0 recovers the log-uniform). Without `vbar`: (uv, vbar)
/// are solved from the 2x2 system and lambda2 = 1/(2((vbar-uv) -
/// vbar log(vbar/uv))) < 0, lambda1 = -2 lambda2 vbar, which guarantees
/// revenue uv with no support bound. Infeasible inputs throw
/// std::domain_error naming the violated inequality.
SingleBidderSolution single_two_moment(double mu, double mu2, std::optional<double> vbar,
                                       std::optional<double> lambda2);

/// View a single-bidder solution through the n-bidder solution type (n = 1),
/// with lambda = lambda1 so the pointwise certification applies unchanged.
EquilibriumSolution to_equilibrium(const SingleBidderSolution& sol);

/// Dispatch on n: 1 -> single_mean_ub, 2 -> equilibrium_two, else
/// equilibrium_n.
EquilibriumSolution solve_equilibrium(const ParametricSetting& setting);

}  // namespace reserve
