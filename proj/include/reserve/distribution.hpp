#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "reserve/random.hpp"

namespace reserve {

// Analytic CDF shapes used by the equilibrium distributions. Each form keeps
// the full CDF value on its interval (any jump below is already folded in).

/// Flat piece: F(v) = c.
struct Constant {
    double c = 0.0;
};

/// Generalized equal-revenue piece: F(v) = 1 - a/v.
struct EqualRevenue {
    double a = 0.0;
};

/// Log-uniform (reciprocal) piece: F(v) = log(v/lo0) / log(hi0/lo0).
struct LogUniform {
    double lo0 = 0.0;
    double hi0 = 0.0;
};

/// Two-moment reserve family: F(r) = lambda1*log(r/uv) + 2*lambda2*(r - uv).
struct AffineLog {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double uv = 0.0;
};

/// Two-bidder reserve piece on (uv, vbar]:
/// F(r) = (1 - uv/vbar) * (r/(r-uv)) * log(r/uv)/log(vbar/uv).
struct TwoBidderRatio {
    double uv = 0.0;
    double vbar = 0.0;
};

/// n-bidder reserve piece on [uv, vbar], a = uv/(n-1)^2:
/// F(r) = (1-a/vbar)^{n-1} * (r/(r-a))^{n-1} * (c0 + log(r/uv)) / (c0 + log(vbar/uv)),
/// with c0 = n - 1 - 1/(n-1).
struct TruncLogRatio {
    int n = 3;
    double a = 0.0;
    double uv = 0.0;
    double vbar = 0.0;
};

using SegmentForm =
    std::variant<Constant, EqualRevenue, LogUniform, AffineLog, TwoBidderRatio, TruncLogRatio>;

/// One analytic piece of a CDF, valid on [lo, hi).
struct Segment {
    double lo = 0.0;
    double hi = 0.0;
    SegmentForm form;
};

/// Mixed distribution on [0, domain_hi]: contiguous analytic segments plus
/// explicit point masses. The CDF is right-continuous and equals 1 at and
/// above domain_hi. Segment values already include any atoms below them; the
/// atom list records the jump sizes exactly.
struct PiecewiseCdf {
    std::vector<Segment> segments;
    std::vector<std::pair<double, double>> atoms;  // (location, mass), ascending
    double domain_hi = 0.0;
};

/// Structural and numerical health report for a PiecewiseCdf.
struct DistributionCheck {
    bool passed = false;
    bool structure_ok = false;       // ordering, contiguity, coverage of [0, domain_hi)
    bool atoms_ok = false;           // each listed atom matches the actual jump
    double monotone_violation = 0.0; // worst decrease found on the dense grid
    double range_violation = 0.0;    // worst excursion outside [0, 1]
    double mass_error = 0.0;         // |CDF(domain_hi^-) + atom(domain_hi) - 1|
    double worst_point = 0.0;        // location of the worst monotonicity offender
    std::string message;
};

double form_eval(const SegmentForm& form, double v);
double form_deriv(const SegmentForm& form, double v);

/// Right-continuous CDF value. Returns 1 for v >= domain_hi and 0 for v < 0.
double cdf_eval(const PiecewiseCdf& dist, double v);

/// CDF derivative of the segment containing v; 0 outside all segments.
/// Throws std::domain_error if v sits on an atom (the derivative is undefined).
double cdf_deriv(const PiecewiseCdf& dist, double v);

/// Generalized inverse inf{v : CDF(v) >= p} for p in [0, 1]. Atoms map whole
/// p-intervals to their location exactly.
double quantile(const PiecewiseCdf& dist, double p);

/// Inverse-transform sample, deterministic per stream state.
double sample(const PiecewiseCdf& dist, RandomStream& rng);

/// Raw moment of order 1 or 2 via tail integrals: E[V] = int (1-F),
/// E[V^2] = int 2v(1-F). Closed per-segment forms where available, adaptive
/// quadrature (abs tol 1e-12) otherwise.
double moment(const PiecewiseCdf& dist, int order);

/// Grid-based validation: monotonicity and range on >= 10^4 points per
/// segment plus endpoints +/- 1e-12, contiguity, atom/jump agreement, total
/// mass. Never throws; failures are carried in the report.
DistributionCheck validate(const PiecewiseCdf& dist);

/// Dirac mass at x (support upper end = x).
PiecewiseCdf point_mass(double x);

/// Right-continuous step CDF with value `values[j]` on [grid[j], grid[j+1])
/// and 1 at and above hi. `values` must be nondecreasing in [0, 1].
PiecewiseCdf step_cdf(const Eigen::ArrayXd& grid, const Eigen::ArrayXd& values, double hi);

/// Location of every jump and segment boundary, ascending and deduplicated.
std::vector<double> breakpoints(const PiecewiseCdf& dist);

}  // namespace reserve
