#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reserve/closed_form.hpp"
#include "reserve/discrete.hpp"
#include "reserve/mechanisms.hpp"
#include "reserve/montecarlo.hpp"
#include "reserve/serialize.hpp"
#include "reserve/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitBadArgs = 2;
constexpr int kExitNumeric = 3;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw std::invalid_argument("cannot open output file: " + out_path);
    os << text;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("ROBUST_RESERVE_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 20240817ULL;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-min reserve pricing for second-price auctions with known mean and bound"};
    app.require_subcommand(1);

    int n = 2;
    double mu = 0.3, vbar = 1.0, mu2 = 0.0, tol = 1e-8;
    std::optional<double> lambda2;
    int k = 100, grid = 1000;
    std::vector<int> ks{10, 100, 1000};
    long long trials = 1000000;
    std::uint64_t seed = default_seed();
    std::string out, tie_sale = "strict", mode = "mean-ub";

    auto add_setting = [&](CLI::App* cmd, bool with_n = true) {
        if (with_n) cmd->add_option("--n", n, "bidder count");
        cmd->add_option("--mu", mu, "known mean value")->required();
        cmd->add_option("--vbar", vbar, "support upper bound");
        cmd->add_option("--out", out, "output path (stdout when omitted)");
    };

    auto* solve = app.add_subcommand("solve", "closed-form equilibrium (JSON + CSV grid)");
    add_setting(solve);
    solve->add_option("--grid", grid, "CSV grid points");

    auto* discrete = app.add_subcommand("discrete", "discretized saddle point (CSV)");
    add_setting(discrete);
    discrete->add_option("--k", k, "grid parameter")->required();

    auto* converge = app.add_subcommand("converge", "discrete-to-closed-form distances (CSV)");
    add_setting(converge, false);
    converge->add_option("--ks", ks, "grid parameters")->delimiter(',');

    auto* verify = app.add_subcommand("verify", "certify the equilibrium (JSON report)");
    add_setting(verify);
    verify->add_option("--tol", tol, "certification tolerance");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the equilibrium pair");
    add_setting(simulate);
    simulate->add_option("--trials", trials, "number of trials");
    simulate->add_option("--seed", seed, "random seed (env ROBUST_RESERVE_SEED as fallback)");
    simulate->add_option("--tie-sale", tie_sale, "strict | inclusive")
        ->check(CLI::IsMember({"strict", "inclusive"}));

    auto* single = app.add_subcommand("single", "single-bidder pricing solutions");
    single->add_option("--mode", mode, "mean-ub | moments-ub | moments")
        ->check(CLI::IsMember({"mean-ub", "moments-ub", "moments"}));
    single->add_option("--mu", mu, "known mean value")->required();
    single->add_option("--mu2", mu2, "second-moment bound");
    single->add_option("--vbar", vbar, "support upper bound");
    single->add_option("--lambda2", lambda2, "family member (moments-ub mode)");
    single->add_option("--out", out, "output path");

    auto* demo = app.add_subcommand("demo-suboptimal",
                                    "three-bidder instance where second price is beaten");
    demo->add_option("--out", out, "output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            const auto sol = reserve::solve_equilibrium({n, mu, vbar});
            emit(reserve::to_json(sol).dump(2), out);
            if (!out.empty()) {
                std::ofstream csv(out + ".csv");
                reserve::write_solution_csv(csv, sol, grid);
            }
        } else if (discrete->parsed()) {
            std::ostringstream os;
            if (n == 1) {
                const auto s = reserve::single_mean_ub({1, mu, vbar});
                reserve::write_discrete_csv(os, reserve::solve_discrete_single(mu, vbar, s.uv, k));
            } else if (n == 2) {
                reserve::write_discrete_csv(os, reserve::solve_discrete_two({2, mu, vbar}, k));
            } else {
                throw std::invalid_argument(
                    "discrete: only n = 1 (geometric grid) and n = 2 are solvable");
            }
            emit(os.str(), out);
        } else if (converge->parsed()) {
            std::ostringstream os;
            reserve::write_convergence_csv(os, reserve::convergence_study({2, mu, vbar}, ks));
            emit(os.str(), out);
        } else if (verify->parsed()) {
            const auto sol = reserve::solve_equilibrium({n, mu, vbar});
            const auto rep = reserve::certify_equilibrium(sol, tol);
            emit(reserve::to_json(rep).dump(2), out);
            if (!rep.passed) return kExitVerifyFailed;
        } else if (simulate->parsed()) {
            const auto sol = reserve::solve_equilibrium({n, mu, vbar});
            const auto tie =
                tie_sale == "strict" ? reserve::TieSale::strict : reserve::TieSale::inclusive;
            const auto rep = reserve::simulate_auction(sol.f_star, sol.q_star, n, trials, seed,
                                                       tie, sol.robust_revenue);
            emit(reserve::to_json(rep).dump(2), out);
        } else if (single->parsed()) {
            reserve::SingleBidderSolution sol;
            if (mode == "mean-ub") {
                sol = reserve::single_mean_ub({1, mu, vbar});
            } else if (mode == "moments-ub") {
                sol = reserve::single_two_moment(mu, mu2, vbar, lambda2);
            } else {
                sol = reserve::single_two_moment(mu, mu2, std::nullopt, std::nullopt);
            }
            emit(reserve::to_json(sol).dump(2), out);
        } else if (demo->parsed()) {
            const auto [spa, ironed] =
                reserve::suboptimality_demo({3, 2.0 / 3.0, 1.0});
            nlohmann::json j{{"second_price_robust_revenue", spa},
                             {"ironed_mechanism_revenue", ironed}};
            emit(j.dump(2), out);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArgs;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArgs;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}
