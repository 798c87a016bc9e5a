#include "reserve/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "reserve/numeric.hpp"

namespace reserve {

namespace {

// log(r/uv)/(r-uv) with a series once r is within relative 1e-5 of uv.
double log_ratio_over_gap(double r, double uv) {
    const double w = (r - uv) / uv;
    if (std::fabs(w) < 1e-5) {
        return (1.0 - w * (0.5 - w * (1.0 / 3.0 - w * 0.25))) / uv;
    }
    return std::log1p(w) / (r - uv);
}

// ((r-uv) - uv*log(r/uv)) / (r-uv)^2, stable near r = uv where it tends to
// 1/(2 uv).
double gap_minus_log_over_gap2(double r, double uv) {
    const double w = (r - uv) / uv;
    if (std::fabs(w) < 1e-5) {
        return (0.5 - w * (1.0 / 3.0 - w * 0.25)) / uv;
    }
    const double d = r - uv;
    return (d - uv * std::log1p(w)) / (d * d);
}

struct EvalVisitor {
    double v;
    double operator()(const Constant& f) const { return f.c; }
    double operator()(const EqualRevenue& f) const { return 1.0 - f.a / v; }
    double operator()(const LogUniform& f) const {
        return std::log(v / f.lo0) / std::log(f.hi0 / f.lo0);
    }
    double operator()(const AffineLog& f) const {
        return f.lambda1 * std::log(v / f.uv) + 2.0 * f.lambda2 * (v - f.uv);
    }
    double operator()(const TwoBidderRatio& f) const {
        const double c0 = (1.0 - f.uv / f.vbar) / std::log(f.vbar / f.uv);
        return c0 * v * log_ratio_over_gap(v, f.uv);
    }
    double operator()(const TruncLogRatio& f) const {
        const double c0 = f.n - 1.0 - 1.0 / (f.n - 1.0);
        const double d = c0 + std::log(f.vbar / f.uv);
        const double k = powi(1.0 - f.a / f.vbar, f.n - 1);
        return k * powi(v / (v - f.a), f.n - 1) * (c0 + std::log(v / f.uv)) / d;
    }
};

struct DerivVisitor {
    double v;
    double operator()(const Constant&) const { return 0.0; }
    double operator()(const EqualRevenue& f) const { return f.a / (v * v); }
    double operator()(const LogUniform& f) const { return 1.0 / (v * std::log(f.hi0 / f.lo0)); }
    double operator()(const AffineLog& f) const { return f.lambda1 / v + 2.0 * f.lambda2; }
    double operator()(const TwoBidderRatio& f) const {
        const double c0 = (1.0 - f.uv / f.vbar) / std::log(f.vbar / f.uv);
        return c0 * gap_minus_log_over_gap2(v, f.uv);
    }
    double operator()(const TruncLogRatio& f) const {
        const double c0 = f.n - 1.0 - 1.0 / (f.n - 1.0);
        const double d = c0 + std::log(f.vbar / f.uv);
        const double k = powi(1.0 - f.a / f.vbar, f.n - 1);
        return k / d * powi(v / (v - f.a), f.n) *
               (v - f.uv - f.a * (f.n - 1.0) * std::log(v / f.uv)) / (v * v);
    }
};

// Closed-form inverse where one exists; otherwise in-segment bisection.
std::optional<double> closed_form_inverse(const SegmentForm& form, double p) {
    if (const auto* er = std::get_if<EqualRevenue>(&form)) return er->a / (1.0 - p);
    if (const auto* lu = std::get_if<LogUniform>(&form))
        return lu->lo0 * std::exp(p * std::log(lu->hi0 / lu->lo0));
    return std::nullopt;
}

const Segment* segment_at(const PiecewiseCdf& dist, double v) {
    // Segments are contiguous and ascending; find the one with lo <= v < hi.
    auto it = std::upper_bound(dist.segments.begin(), dist.segments.end(), v,
                               [](double x, const Segment& s) { return x < s.lo; });
    if (it == dist.segments.begin()) return nullptr;
    --it;
    if (v >= it->lo && v < it->hi) return &*it;
    return nullptr;
}

}  // namespace

double form_eval(const SegmentForm& form, double v) { return std::visit(EvalVisitor{v}, form); }

double form_deriv(const SegmentForm& form, double v) { return std::visit(DerivVisitor{v}, form); }

double cdf_eval(const PiecewiseCdf& dist, double v) {
    if (v >= dist.domain_hi) return 1.0;
    if (v < 0.0) return 0.0;
    const Segment* seg = segment_at(dist, v);
    if (seg == nullptr) {
        throw std::domain_error("cdf_eval: value not covered by any segment (malformed CDF)");
    }
    return form_eval(seg->form, v);
}

double cdf_deriv(const PiecewiseCdf& dist, double v) {
    for (const auto& [p, m] : dist.atoms) {
        if (v == p) throw std::domain_error("cdf_deriv: undefined at an atom");
    }
    if (v >= dist.domain_hi || v < 0.0) return 0.0;
    const Segment* seg = segment_at(dist, v);
    return seg != nullptr ? form_deriv(seg->form, v) : 0.0;
}

double quantile(const PiecewiseCdf& dist, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0, 1]");
    if (p <= 0.0) return 0.0;
    for (const auto& seg : dist.segments) {
        const double f_lo = form_eval(seg.form, seg.lo);
        if (p <= f_lo) return seg.lo;
        const double f_hi = form_eval(seg.form, seg.hi);  // left limit at hi
        if (p <= f_hi) {
            if (auto v = closed_form_inverse(seg.form, p)) {
                return std::clamp(*v, seg.lo, seg.hi);
            }
            // Safeguarded Newton on the monotone segment form.
            double lo = seg.lo, hi = seg.hi;
            double v = 0.5 * (lo + hi);
            for (int it = 0; it < 100; ++it) {
                const double fv = form_eval(seg.form, v) - p;
                if (fv < 0.0)
                    lo = v;
                else
                    hi = v;
                if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
                const double dv = form_deriv(seg.form, v);
                double next = dv > 0.0 ? v - fv / dv : 0.5 * (lo + hi);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                v = next;
            }
            return hi;  // smallest point with F >= p
        }
    }
    return dist.domain_hi;
}

double sample(const PiecewiseCdf& dist, RandomStream& rng) {
    // p in (0, 1]: avoids the degenerate inf at p = 0 and reaches top atoms.
    const double p = 1.0 - rng.next_double();
    return quantile(dist, p);
}

namespace {

// int_a^b (1 - F) dv for one segment form.
struct TailIntVisitor {
    double a, b;
    double operator()(const Constant& f) const { return (1.0 - f.c) * (b - a); }
    double operator()(const EqualRevenue& f) const { return f.a * std::log(b / a); }
    double operator()(const LogUniform& f) const {
        const double L = std::log(f.hi0 / f.lo0);
        auto anti = [&](double v) { return v * (std::log(v / f.lo0) - 1.0); };
        return (b - a) - (anti(b) - anti(a)) / L;
    }
    double operator()(const AffineLog& f) const {
        auto anti = [&](double v) {
            return f.lambda1 * v * (std::log(v / f.uv) - 1.0) + f.lambda2 * (v - f.uv) * (v - f.uv);
        };
        return (b - a) - (anti(b) - anti(a));
    }
    template <class Generic>
    double operator()(const Generic& f) const {
        SegmentForm form = f;
        return adaptive_simpson([&](double v) { return 1.0 - form_eval(form, v); }, a, b, 1e-12);
    }
};

// int_a^b 2 v (1 - F) dv for one segment form.
struct TailVIntVisitor {
    double a, b;
    double operator()(const Constant& f) const { return (1.0 - f.c) * (b * b - a * a); }
    double operator()(const EqualRevenue& f) const { return 2.0 * f.a * (b - a); }
    double operator()(const LogUniform& f) const {
        const double L = std::log(f.hi0 / f.lo0);
        auto anti = [&](double v) { return v * v * (0.5 * std::log(v / f.lo0) - 0.25); };
        return (b * b - a * a) - 2.0 * (anti(b) - anti(a)) / L;
    }
    template <class Generic>
    double operator()(const Generic& f) const {
        SegmentForm form = f;
        return adaptive_simpson([&](double v) { return 2.0 * v * (1.0 - form_eval(form, v)); }, a,
                                b, 1e-12);
    }
};

}  // namespace

double moment(const PiecewiseCdf& dist, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("moment: order must be 1 or 2");
    KahanSum acc;
    for (const auto& seg : dist.segments) {
        const double b = std::min(seg.hi, dist.domain_hi);
        if (!(b > seg.lo)) continue;
        if (order == 1)
            acc.add(std::visit(TailIntVisitor{seg.lo, b}, seg.form));
        else
            acc.add(std::visit(TailVIntVisitor{seg.lo, b}, seg.form));
    }
    return acc.value();
}

DistributionCheck validate(const PiecewiseCdf& dist) {
    DistributionCheck rep;
    std::ostringstream msg;

    rep.structure_ok = true;
    if (dist.domain_hi < 0.0) {
        rep.structure_ok = false;
        msg << "negative domain_hi; ";
    }
    double cursor = 0.0;
    for (std::size_t i = 0; i < dist.segments.size(); ++i) {
        const auto& s = dist.segments[i];
        if (!(s.hi > s.lo)) {
            rep.structure_ok = false;
            msg << "segment " << i << " empty or reversed; ";
        }
        if (std::fabs(s.lo - cursor) > 1e-12 * std::max(1.0, dist.domain_hi)) {
            rep.structure_ok = false;
            msg << "segment " << i << " not contiguous at " << s.lo << "; ";
        }
        cursor = s.hi;
    }
    if (!dist.segments.empty() &&
        std::fabs(cursor - dist.domain_hi) > 1e-12 * std::max(1.0, dist.domain_hi)) {
        rep.structure_ok = false;
        msg << "segments do not reach domain_hi; ";
    }
    if (dist.segments.empty() && dist.domain_hi != 0.0) {
        rep.structure_ok = false;
        msg << "no segments but domain_hi > 0; ";
    }

    // Dense monotonicity / range scan, 10^4 interior points per segment plus
    // the endpoints nudged by 1e-12.
    double prev = 0.0;
    bool have_prev = false;
    auto scan_point = [&](double v) {
        double val;
        try {
            val = cdf_eval(dist, v);
        } catch (const std::exception&) {
            rep.structure_ok = false;
            return;
        }
        rep.range_violation = std::max(rep.range_violation, std::max(-val, val - 1.0));
        if (have_prev && val < prev) {
            const double drop = prev - val;
            if (drop > rep.monotone_violation) {
                rep.monotone_violation = drop;
                rep.worst_point = v;
            }
        }
        prev = val;
        have_prev = true;
    };
    constexpr int kGrid = 10000;
    const double nudge = 1e-12;
    for (const auto& s : dist.segments) {
        scan_point(std::max(0.0, s.lo - nudge));
        scan_point(s.lo);
        scan_point(s.lo + nudge);
        for (int j = 1; j < kGrid; ++j) {
            scan_point(s.lo + (s.hi - s.lo) * j / kGrid);
        }
        scan_point(std::max(s.lo, s.hi - nudge));
    }
    scan_point(dist.domain_hi);

    // Atom bookkeeping: every listed atom must match the actual jump, masses
    // positive, and the left limit at domain_hi plus its atom must reach 1.
    rep.atoms_ok = true;
    double atom_at_top = 0.0;
    for (const auto& [p, m] : dist.atoms) {
        if (!(m > 0.0)) {
            rep.atoms_ok = false;
            msg << "nonpositive atom mass at " << p << "; ";
            continue;
        }
        if (p == dist.domain_hi) atom_at_top = m;
        double left = 0.0;
        if (p > 0.0) {
            const Segment* below = segment_at(dist, std::nextafter(p, 0.0));
            left = below != nullptr ? form_eval(below->form, p) : 0.0;
        }
        const double right = p >= dist.domain_hi ? 1.0 : cdf_eval(dist, p);
        if (std::fabs(right - left - m) > 1e-9) {
            rep.atoms_ok = false;
            msg << "atom at " << p << " does not match jump (" << right - left << " vs " << m
                << "); ";
        }
    }
    double top_left = 1.0;
    if (!dist.segments.empty()) {
        top_left = form_eval(dist.segments.back().form, dist.segments.back().hi);
    } else if (dist.domain_hi == 0.0) {
        top_left = 1.0 - atom_at_top;  // all mass sits at zero
    }
    rep.mass_error = std::fabs(top_left + atom_at_top - 1.0);
    if (rep.mass_error > 1e-9) msg << "total mass off by " << rep.mass_error << "; ";

    rep.passed = rep.structure_ok && rep.atoms_ok && rep.monotone_violation <= 1e-9 &&
                 rep.range_violation <= 1e-9 && rep.mass_error <= 1e-9;
    rep.message = msg.str();
    return rep;
}

PiecewiseCdf point_mass(double x) {
    PiecewiseCdf d;
    d.domain_hi = x;
    if (x > 0.0) d.segments.push_back({0.0, x, Constant{0.0}});
    d.atoms.emplace_back(x, 1.0);
    return d;
}

PiecewiseCdf step_cdf(const Eigen::ArrayXd& grid, const Eigen::ArrayXd& values, double hi) {
    if (grid.size() != values.size() || grid.size() == 0) {
        throw std::invalid_argument("step_cdf: grid/value size mismatch");
    }
    PiecewiseCdf d;
    d.domain_hi = hi;
    double cursor = 0.0;
    double prev_val = 0.0;
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        const double lo = grid[j];
        if (lo >= hi) break;
        const double up = j + 1 < grid.size() ? std::min(grid[j + 1], hi) : hi;
        if (lo > cursor) d.segments.push_back({cursor, lo, Constant{prev_val}});
        const double val = values[j];
        if (val > prev_val + 1e-15) d.atoms.emplace_back(lo, val - prev_val);
        if (up > lo) d.segments.push_back({lo, up, Constant{val}});
        cursor = std::max(cursor, up);
        prev_val = val;
    }
    if (1.0 > prev_val + 1e-15) d.atoms.emplace_back(hi, 1.0 - prev_val);
    return d;
}

std::vector<double> breakpoints(const PiecewiseCdf& dist) {
    std::vector<double> pts;
    for (const auto& s : dist.segments) {
        pts.push_back(s.lo);
        pts.push_back(s.hi);
    }
    for (const auto& [p, m] : dist.atoms) pts.push_back(p);
    pts.push_back(dist.domain_hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace reserve
