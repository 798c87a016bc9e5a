#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>

#include "reserve/closed_form.hpp"
#include "reserve/distribution.hpp"
#include "reserve/revenue.hpp"
#include "reserve/setting.hpp"

namespace reserve {

/// Numeric certification summary. `passed` holds iff every deviation is
/// below its tolerance. The certificate is grid-based, not symbolic, which
/// `scope` records.
struct VerificationReport {
    bool passed = false;
    double indifference_dev = 0.0;  // max |Rev(r) - constant| on the equal-revenue set
    double one_sided_dev = 0.0;     // max Rev(r) - constant where only <= is claimed
    double pointwise_dev = 0.0;     // max h(F*(v)) - min_z h(z) on the check grid
    double mean_dev = 0.0;          // |E[V] - mu|
    bool monotone_ok = false;       // both CDFs validate structurally
    double br_revenue = 0.0;        // best-response revenue against Q*
    double br_gap = 0.0;            // max(0, robust_revenue - br_revenue)
    bool br_monotone = true;        // pointwise argmin was monotone in v
    double worst_indifference_r = 0.0;
    double worst_pointwise_v = 0.0;
    std::string scope = "grid-certified";
    std::string details;
};

struct BestResponseOptions {
    int v_grid = 2000;
    int z_grid = 400;
    int golden_iters = 50;
    double tie_tol = 1e-11;   // h gap under which two minimizers count as tied
    double mean_tol = 1e-10;  // target |mean - mu|
};

/// Adversary best response to a reserve distribution: for a bisected
/// multiplier, picks the CDF value minimizing the pointwise objective at
/// every grid point (coarse z-grid plus golden-section refinement), handling
/// tied minimizers by a monotone threshold selection so the mean constraint
/// lands on mu. Returns the grid CDF as a step distribution.
struct BestResponse {
    Eigen::ArrayXd grid;    // v points, atoms of Q excluded
    Eigen::ArrayXd values;  // selected CDF values
    PiecewiseCdf cdf;       // step form of the same
    double lambda = 0.0;
    double mean = 0.0;
    bool monotone = true;
};

BestResponse adversary_best_response(const PiecewiseCdf& q, const ParametricSetting& setting,
                                     const BestResponseOptions& opt = {});

/// Best deterministic reserve against F over a grid including every atom
/// (+/- 1e-9) and segment endpoint: (argmax reserve, its revenue).
std::pair<double, double> seller_best_reserve(const PiecewiseCdf& f, int n, int grid_size);

/// Revenue constancy across the support of Q* (plus the one-sided region for
/// n >= 3 where only "no better than the constant" is claimed).
VerificationReport check_indifference(const EquilibriumSolution& sol, double tol);

/// Pointwise minimality of F* for the solved multiplier on a 2000-point
/// v-grid against a 400-point z-grid.
VerificationReport check_pointwise_lagrangian(const EquilibriumSolution& sol, double tol);

/// Full certificate: structural validation of both CDFs, mean constraint,
/// revenue indifference, pointwise minimality, and no profitable adversary
/// deviation found by the best-response oracle.
VerificationReport certify_equilibrium(const EquilibriumSolution& sol, double tol);

/// The three-bidder instance (mu = 2/3, vbar = 1) where a second-price
/// auction is not optimal: returns (second-price robust revenue, ironed
/// mechanism revenue) = (0.625, 0.75), both by exact enumeration.
std::pair<double, double> suboptimality_demo(const ParametricSetting& setting);

}  // namespace reserve
