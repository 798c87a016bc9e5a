#pragma once

#include <map>
#include <string>
#include <vector>

#include "reserve/closed_form.hpp"
#include "reserve/distribution.hpp"

namespace reserve {

/// Winner-payment tail integrand for a second-price auction with n i.i.d.
/// bidders: G_n(F) = 1 - n F^{n-1} + (n-1) F^n, the survival function of the
/// second-highest value. For n = 1 it is identically zero.
double second_highest_survival(double f, int n);

/// Precomputed expected-revenue evaluator against a fixed value distribution:
/// Rev_F(r) = r (1 - F^n(r)) + int_r^{vbar} G_n(F(v)) dv. Exact on constant
/// and equal-revenue pieces, adaptive quadrature elsewhere. Suffix integrals
/// are cached at the distribution's breakpoints so each call costs a binary
/// search plus one partial piece.
class RevenueEvaluator {
  public:
    RevenueEvaluator(const PiecewiseCdf& f, int n);

    double rev(double r) const;
    /// int_r^{vbar} G_n(F) dv
    double tail(double r) const;
    int bidders() const { return n_; }

  private:
    PiecewiseCdf f_;
    int n_ = 2;
    std::vector<double> bp_;
    std::vector<double> suffix_;
};

/// Expected revenue of a second-price auction with fixed reserve r against
/// value distribution F (sale only when the maximum value strictly exceeds
/// r). n = 1 degenerates to the posted price r (1 - F(r)).
double rev_fixed_reserve(const PiecewiseCdf& f, double r, int n);

/// Expected revenue with the reserve drawn from Q: atoms handled exactly,
/// the continuous part integrated segment-wise against the analytic density.
double rev_randomized(const PiecewiseCdf& f, const PiecewiseCdf& q, int n);

/// Mean-constrained objective Rev_F(Q) - lambda * E_F[V]; for any F with
/// mean mu this equals Rev - lambda * mu.
double lagrangian(const PiecewiseCdf& q, const PiecewiseCdf& f, double lambda, int n);

/// Pointwise integrand of the constrained objective as a function of the
/// candidate CDF value z at v:
///   h_v(z) = Q'(v) v (1 - z^n) + Q(v) G_n(z) - lambda (1 - z).
/// Throws std::domain_error when v sits on an atom of Q.
double integrand_h(const PiecewiseCdf& q, double lambda, double v, double z, int n);

/// Closed-form constant revenue of a solved equilibrium.
double robust_revenue_formula(const EquilibriumSolution& sol);
double robust_revenue_formula(const SingleBidderSolution& sol);

/// Labeled breakdown of a randomized-reserve revenue computation.
struct RevenueReport {
    double analytic = 0.0;
    std::map<std::string, double> components;
    std::string method;
};

RevenueReport rev_report(const PiecewiseCdf& f, const PiecewiseCdf& q, int n);

}  // namespace reserve
