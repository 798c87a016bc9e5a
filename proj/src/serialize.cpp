#include "reserve/serialize.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <set>

namespace reserve {

using nlohmann::json;

namespace {

json form_to_json(const SegmentForm& form) {
    json j;
    if (const auto* c = std::get_if<Constant>(&form)) {
        j["type"] = "constant";
        j["c"] = c->c;
    } else if (const auto* er = std::get_if<EqualRevenue>(&form)) {
        j["type"] = "equal_revenue";
        j["a"] = er->a;
    } else if (const auto* lu = std::get_if<LogUniform>(&form)) {
        j["type"] = "log_uniform";
        j["lo0"] = lu->lo0;
        j["hi0"] = lu->hi0;
    } else if (const auto* al = std::get_if<AffineLog>(&form)) {
        j["type"] = "affine_log";
        j["lambda1"] = al->lambda1;
        j["lambda2"] = al->lambda2;
        j["uv"] = al->uv;
    } else if (const auto* tb = std::get_if<TwoBidderRatio>(&form)) {
        j["type"] = "two_bidder_ratio";
        j["uv"] = tb->uv;
        j["vbar"] = tb->vbar;
    } else if (const auto* tl = std::get_if<TruncLogRatio>(&form)) {
        j["type"] = "trunc_log_ratio";
        j["n"] = tl->n;
        j["a"] = tl->a;
        j["uv"] = tl->uv;
        j["vbar"] = tl->vbar;
    }
    return j;
}

SegmentForm form_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") return Constant{j.at("c").get<double>()};
    if (type == "equal_revenue") return EqualRevenue{j.at("a").get<double>()};
    if (type == "log_uniform") {
        return LogUniform{j.at("lo0").get<double>(), j.at("hi0").get<double>()};
    }
    if (type == "affine_log") {
        return AffineLog{j.at("lambda1").get<double>(), j.at("lambda2").get<double>(),
                         j.at("uv").get<double>()};
    }
    if (type == "two_bidder_ratio") {
        return TwoBidderRatio{j.at("uv").get<double>(), j.at("vbar").get<double>()};
    }
    if (type == "trunc_log_ratio") {
        return TruncLogRatio{j.at("n").get<int>(), j.at("a").get<double>(),
                             j.at("uv").get<double>(), j.at("vbar").get<double>()};
    }
    throw std::invalid_argument("unknown segment form: " + type);
}

}  // namespace

json to_json(const PiecewiseCdf& dist) {
    json segs = json::array();
    for (const auto& s : dist.segments) {
        segs.push_back({{"lo", s.lo}, {"hi", s.hi}, {"form", form_to_json(s.form)}});
    }
    json atoms = json::array();
    for (const auto& [p, m] : dist.atoms) atoms.push_back({p, m});
    return {{"segments", segs}, {"atoms", atoms}, {"domain_hi", dist.domain_hi}};
}

PiecewiseCdf cdf_from_json(const json& j) {
    PiecewiseCdf d;
    d.domain_hi = j.at("domain_hi").get<double>();
    for (const auto& s : j.at("segments")) {
        d.segments.push_back(
            {s.at("lo").get<double>(), s.at("hi").get<double>(), form_from_json(s.at("form"))});
    }
    for (const auto& a : j.at("atoms")) {
        d.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    }
    return d;
}

json to_json(const ParametricSetting& s) { return {{"n", s.n}, {"mu", s.mu}, {"vbar", s.vbar}}; }

ParametricSetting setting_from_json(const json& j) {
    return {j.at("n").get<int>(), j.at("mu").get<double>(), j.at("vbar").get<double>()};
}

json to_json(const EquilibriumSolution& sol) {
    json j{{"setting", to_json(sol.setting)},
           {"F_star", to_json(sol.f_star)},
           {"Q_star", to_json(sol.q_star)},
           {"uv", sol.uv},
           {"lambda", sol.lambda},
           {"robust_revenue", sol.robust_revenue},
           {"boundary_case", sol.boundary_case}};
    j["v0"] = sol.v0.has_value() ? json(*sol.v0) : json(nullptr);
    j["a"] = sol.a.has_value() ? json(*sol.a) : json(nullptr);
    return j;
}

EquilibriumSolution equilibrium_from_json(const json& j) {
    EquilibriumSolution sol;
    sol.setting = setting_from_json(j.at("setting"));
    sol.f_star = cdf_from_json(j.at("F_star"));
    sol.q_star = cdf_from_json(j.at("Q_star"));
    sol.uv = j.at("uv").get<double>();
    sol.lambda = j.at("lambda").get<double>();
    sol.robust_revenue = j.at("robust_revenue").get<double>();
    sol.boundary_case = j.at("boundary_case").get<bool>();
    if (!j.at("v0").is_null()) sol.v0 = j.at("v0").get<double>();
    if (!j.at("a").is_null()) sol.a = j.at("a").get<double>();
    return sol;
}

json to_json(const SingleBidderSolution& sol) {
    json j{{"mu", sol.mu},
           {"uv", sol.uv},
           {"lambda1", sol.lambda1},
           {"lambda2", sol.lambda2},
           {"F_star", to_json(sol.f_star)},
           {"Q_star", to_json(sol.q_star)},
           {"robust_revenue", sol.robust_revenue}};
    j["mu2"] = sol.mu2.has_value() ? json(*sol.mu2) : json(nullptr);
    j["vbar"] = sol.vbar.has_value() ? json(*sol.vbar) : json(nullptr);
    return j;
}

json to_json(const VerificationReport& rep) {
    return {{"passed", rep.passed},
            {"indifference_dev", rep.indifference_dev},
            {"one_sided_dev", rep.one_sided_dev},
            {"pointwise_dev", rep.pointwise_dev},
            {"mean_dev", rep.mean_dev},
            {"monotone_ok", rep.monotone_ok},
            {"best_response_revenue", rep.br_revenue},
            {"best_response_gap", rep.br_gap},
            {"best_response_monotone", rep.br_monotone},
            {"worst_indifference_r", rep.worst_indifference_r},
            {"worst_pointwise_v", rep.worst_pointwise_v},
            {"scope", rep.scope},
            {"details", rep.details}};
}

json to_json(const SimReport& rep) {
    json j{{"mean_revenue", rep.mean_revenue},
           {"std_error", rep.std_error},
           {"trials", rep.trials},
           {"seed", rep.seed},
           {"rejected", rep.rejected}};
    j["analytic_ref"] = rep.analytic_ref.has_value() ? json(*rep.analytic_ref) : json(nullptr);
    j["z_score"] = rep.z_score.has_value() ? json(*rep.z_score) : json(nullptr);
    return j;
}

namespace {

// Even grid over [0, hi] merged with a distribution's own breakpoints.
std::vector<double> plot_grid(const std::vector<double>& breaks, double hi, int grid_points) {
    std::set<double> pts(breaks.begin(), breaks.end());
    for (int i = 0; i <= grid_points; ++i) pts.insert(hi * i / grid_points);
    return {pts.begin(), pts.end()};
}

void write_row(std::ostream& os, std::initializer_list<double> cols) {
    char buf[64];
    bool first = true;
    for (double c : cols) {
        std::snprintf(buf, sizeof(buf), "%.17g", c);
        if (!first) os << ',';
        os << buf;
        first = false;
    }
    os << '\n';
}

}  // namespace

void write_cdf_csv(std::ostream& os, const PiecewiseCdf& dist, int grid_points) {
    os << "v,cdf\n";
    for (double v : plot_grid(breakpoints(dist), dist.domain_hi, grid_points)) {
        write_row(os, {v, cdf_eval(dist, v)});
    }
}

void write_solution_csv(std::ostream& os, const EquilibriumSolution& sol, int grid_points) {
    os << "v,F,Q\n";
    std::vector<double> breaks = breakpoints(sol.f_star);
    const std::vector<double> qb = breakpoints(sol.q_star);
    breaks.insert(breaks.end(), qb.begin(), qb.end());
    for (double v : plot_grid(breaks, sol.setting.vbar, grid_points)) {
        write_row(os, {v, cdf_eval(sol.f_star, v), cdf_eval(sol.q_star, v)});
    }
}

void write_discrete_csv(std::ostream& os, const DiscreteEquilibrium& eq) {
    os << "i,r,x,q\n";
    for (int i = 0; i <= eq.k; ++i) {
        const double x = i < eq.k ? eq.x[i] : 1.0;
        const double q = i < eq.k ? eq.q[i] : 1.0;
        write_row(os, {static_cast<double>(i + 1), eq.grid[i], x, q});
    }
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    os << "k,dist_F,dist_Q\n";
    for (const auto& row : rows) {
        write_row(os, {static_cast<double>(row.k), row.dist_f, row.dist_q});
    }
}

}  // namespace reserve
