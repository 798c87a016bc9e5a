#include "reserve/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reserve/numeric.hpp"

namespace reserve {

double second_highest_survival(double f, int n) {
    return 1.0 - n * powi(f, n - 1) + (n - 1) * powi(f, n);
}

namespace {

// int_a^b G_n(F(v)) dv over a sub-range of one segment. The equal-revenue
// form integrates exactly: d/dv [v (1 - F^n(v))] = G_n(F(v)) when
// F' = a/v^2.
double piece_integral(const Segment& seg, double a, double b, int n) {
    if (!(b > a)) return 0.0;
    if (const auto* c = std::get_if<Constant>(&seg.form)) {
        return (b - a) * second_highest_survival(c->c, n);
    }
    if (const auto* er = std::get_if<EqualRevenue>(&seg.form)) {
        auto anti = [&](double v) { return v * (1.0 - powi(1.0 - er->a / v, n)); };
        return anti(b) - anti(a);
    }
    return adaptive_simpson(
        [&](double v) { return second_highest_survival(form_eval(seg.form, v), n); }, a, b, 1e-12);
}

}  // namespace

RevenueEvaluator::RevenueEvaluator(const PiecewiseCdf& f, int n) : f_(f), n_(n) {
    if (n < 1) throw std::invalid_argument("RevenueEvaluator: n must be >= 1");
    bp_.reserve(f_.segments.size() + 1);
    for (const auto& s : f_.segments) bp_.push_back(s.lo);
    bp_.push_back(f_.domain_hi);
    suffix_.assign(bp_.size(), 0.0);
    for (std::size_t j = f_.segments.size(); j-- > 0;) {
        const auto& s = f_.segments[j];
        suffix_[j] = suffix_[j + 1] + piece_integral(s, s.lo, std::min(s.hi, f_.domain_hi), n_);
    }
}

double RevenueEvaluator::tail(double r) const {
    if (r <= 0.0) return suffix_.empty() ? 0.0 : suffix_.front();
    if (r >= f_.domain_hi || f_.segments.empty()) return 0.0;
    auto it = std::upper_bound(bp_.begin(), bp_.end(), r);
    const std::size_t j = static_cast<std::size_t>(it - bp_.begin()) - 1;
    if (j >= f_.segments.size()) return 0.0;
    const auto& s = f_.segments[j];
    return suffix_[j + 1] + piece_integral(s, r, std::min(s.hi, f_.domain_hi), n_);
}

double RevenueEvaluator::rev(double r) const {
    if (r < 0.0) throw std::invalid_argument("rev: reserve must be nonnegative");
    if (r >= f_.domain_hi) return 0.0;
    const double fr = cdf_eval(f_, r);
    return r * (1.0 - powi(fr, n_)) + tail(r);
}

double rev_fixed_reserve(const PiecewiseCdf& f, double r, int n) {
    return RevenueEvaluator(f, n).rev(r);
}

namespace {

double continuous_part(const RevenueEvaluator& ev, const PiecewiseCdf& q, int /*n*/,
                       const std::vector<double>& f_breaks, double tol_per_cell) {
    KahanSum acc;
    for (const auto& seg : q.segments) {
        if (std::holds_alternative<Constant>(seg.form)) continue;  // no density
        const double lo = seg.lo;
        const double hi = std::min(seg.hi, q.domain_hi);
        if (!(hi > lo)) continue;
        // Split at the value distribution's breakpoints so each cell is
        // smooth for the quadrature.
        std::vector<double> cuts{lo};
        for (double b : f_breaks) {
            if (b > lo && b < hi) cuts.push_back(b);
        }
        cuts.push_back(hi);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            acc.add(adaptive_simpson(
                [&](double r) { return form_deriv(seg.form, r) * ev.rev(r); }, cuts[i],
                cuts[i + 1], tol_per_cell));
        }
    }
    return acc.value();
}

}  // namespace

double rev_randomized(const PiecewiseCdf& f, const PiecewiseCdf& q, int n) {
    const RevenueEvaluator ev(f, n);
    KahanSum acc;
    for (const auto& [p, m] : q.atoms) acc.add(m * ev.rev(p));
    acc.add(continuous_part(ev, q, n, breakpoints(f), 1e-12));
    return acc.value();
}

double lagrangian(const PiecewiseCdf& q, const PiecewiseCdf& f, double lambda, int n) {
    return rev_randomized(f, q, n) - lambda * moment(f, 1);
}

double integrand_h(const PiecewiseCdf& q, double lambda, double v, double z, int n) {
    const double qprime = cdf_deriv(q, v);  // throws on atoms
    const double qv = cdf_eval(q, v);
    return qprime * v * (1.0 - powi(z, n)) + qv * second_highest_survival(z, n) -
           lambda * (1.0 - z);
}

double robust_revenue_formula(const EquilibriumSolution& sol) {
    const double n = sol.setting.n;
    const double vbar = sol.setting.vbar;
    if (sol.setting.n == 1) return sol.uv;
    if (sol.setting.n == 2) return 2.0 * sol.uv - sol.uv * sol.uv / vbar;
    if (!sol.boundary_case) {
        return vbar * (1.0 - powi(1.0 - *sol.a / vbar, sol.setting.n));
    }
    const double m = (n - 1.0) * (n - 1.0);
    return vbar * (1.0 - (1.0 - *sol.v0 / vbar) * (1.0 + 1.0 / (n - 1.0)) *
                             powi(1.0 - 1.0 / m, sol.setting.n - 1));
}

double robust_revenue_formula(const SingleBidderSolution& sol) { return sol.uv; }

RevenueReport rev_report(const PiecewiseCdf& f, const PiecewiseCdf& q, int n) {
    const RevenueEvaluator ev(f, n);
    RevenueReport rep;
    KahanSum atoms;
    for (const auto& [p, m] : q.atoms) atoms.add(m * ev.rev(p));
    const double cont = continuous_part(ev, q, n, breakpoints(f), 1e-12);
    rep.components["reserve_atoms"] = atoms.value();
    rep.components["reserve_continuous"] = cont;
    rep.analytic = atoms.value() + cont;
    bool generic = false;
    for (const auto& s : f.segments) {
        if (!std::holds_alternative<Constant>(s.form) &&
            !std::holds_alternative<EqualRevenue>(s.form)) {
            generic = true;
        }
    }
    rep.method = generic ? "quadrature" : "closed-form";
    return rep;
}

}  // namespace reserve
