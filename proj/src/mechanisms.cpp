#include "reserve/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reserve {

namespace {

constexpr double kFiveNinths = 5.0 / 9.0;
constexpr double kIronedMid = 23.0 / 27.0;

}  // namespace

MechanismOutcome Mechanism::outcome(const std::vector<double>& bids, RandomStream& rng) const {
    const auto shares = allocation(bids);
    std::vector<int> winners;
    for (int i = 0; i < static_cast<int>(shares.size()); ++i) {
        if (shares[i].win_prob > 0.0) winners.push_back(i);
    }
    if (winners.empty()) return {};
    int chosen = winners.front();
    if (winners.size() > 1) {
        // Tied winners are uniform, so one variate picks the index.
        const double u = rng.next_double();
        chosen = winners[std::min(winners.size() - 1,
                                  static_cast<std::size_t>(u * winners.size()))];
    }
    return {chosen, shares[chosen].payment_if_win};
}

std::vector<BidderShare> SecondPriceAuction::allocation(const std::vector<double>& bids) const {
    if (bids.empty()) throw std::invalid_argument("spa: empty bid profile");
    for (double b : bids) {
        if (b < 0.0) throw std::invalid_argument("spa: negative bid");
    }
    std::vector<BidderShare> shares(bids.size());
    const double top = *std::max_element(bids.begin(), bids.end());
    const bool sale = tie_sale_ == TieSale::strict ? top > reserve_ : top >= reserve_;
    if (!sale) return shares;
    int ties = 0;
    double second = 0.0;
    for (double b : bids) {
        if (b == top) {
            ++ties;
        } else {
            second = std::max(second, b);
        }
    }
    // With tied tops the second-highest bid equals the top itself.
    if (ties > 1) second = top;
    const double payment = std::max(reserve_, second);
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (bids[i] == top) shares[i] = {1.0 / ties, payment};
    }
    return shares;
}

std::vector<BidderShare> IronedMechanism::allocation(const std::vector<double>& bids) const {
    if (bids.size() != 3) throw std::invalid_argument("ironed mechanism: exactly 3 bids required");
    std::vector<BidderShare> shares(3);
    // Effective report: 0 = ignored, 1 = low menu entry (5/9), 2 = high (1).
    // Menu boundaries tolerate one part in 1e12 so rounded-off equilibrium
    // values still land on their menu point.
    constexpr double kMenuTol = 1e-12;
    int eff[3];
    int highs = 0, lows = 0;
    for (int i = 0; i < 3; ++i) {
        if (bids[i] >= 1.0 - kMenuTol) {
            eff[i] = 2;
            ++highs;
        } else if (bids[i] >= kFiveNinths - kMenuTol) {
            eff[i] = 1;
            ++lows;
        } else {
            eff[i] = 0;
        }
    }
    if (highs + lows == 0) return shares;  // everyone ignored, no sale
    double payment;
    int win_level;
    if (highs >= 2) {
        payment = 1.0;
        win_level = 2;
    } else if (highs == 1) {
        payment = kIronedMid;
        win_level = 2;
    } else {
        payment = kFiveNinths;
        win_level = 1;
    }
    const int winners = win_level == 2 ? highs : lows;
    for (int i = 0; i < 3; ++i) {
        if (eff[i] == win_level) shares[i] = {1.0 / winners, payment};
    }
    return shares;
}

std::vector<BidderShare> FirstPriceAuction::allocation(const std::vector<double>& bids) const {
    if (bids.empty()) throw std::invalid_argument("first-price: empty bid profile");
    std::vector<BidderShare> shares(bids.size());
    const double top = *std::max_element(bids.begin(), bids.end());
    if (!(top > reserve_)) return shares;
    const int ties = static_cast<int>(std::count(bids.begin(), bids.end(), top));
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (bids[i] == top) shares[i] = {1.0 / ties, top};
    }
    return shares;
}

MechanismOutcome spa_outcome(const std::vector<double>& bids, double reserve, RandomStream& rng,
                             TieSale tie_sale) {
    return SecondPriceAuction(reserve, tie_sale).outcome(bids, rng);
}

MechanismOutcome ironed_outcome(const std::vector<double>& bids, RandomStream& rng) {
    return IronedMechanism().outcome(bids, rng);
}

namespace {

double deviator_utility(const Mechanism& mech, double true_type, double report,
                        const std::vector<double>& opponents) {
    std::vector<double> bids;
    bids.reserve(opponents.size() + 1);
    bids.push_back(report);
    bids.insert(bids.end(), opponents.begin(), opponents.end());
    const auto shares = mech.allocation(bids);
    return shares[0].win_prob * (true_type - shares[0].payment_if_win);
}

}  // namespace

TruthfulnessReport truthfulness_check(const Mechanism& mech, const std::vector<double>& type_space,
                                      int n) {
    if (type_space.empty() || n < 1) {
        throw std::invalid_argument("truthfulness_check: empty type space or n < 1");
    }
    const double t_min = *std::min_element(type_space.begin(), type_space.end());
    const double t_max = *std::max_element(type_space.begin(), type_space.end());
    std::vector<double> reports = type_space;
    reports.push_back(0.5 * t_min);         // below-minimum probe
    reports.push_back(1.5 * t_max + 0.01);  // above-maximum probe

    TruthfulnessReport rep;
    rep.passed = true;
    constexpr double kTol = 1e-12;

    const int opp_count = n - 1;
    std::vector<std::size_t> idx(static_cast<std::size_t>(std::max(opp_count, 0)), 0);
    std::vector<double> opponents(static_cast<std::size_t>(std::max(opp_count, 0)), 0.0);
    bool done = false;
    while (!done) {
        for (int j = 0; j < opp_count; ++j) opponents[j] = type_space[idx[j]];
        for (double t : type_space) {
            const double truth = deviator_utility(mech, t, t, opponents);
            for (double d : reports) {
                if (d == t) continue;
                const double dev = deviator_utility(mech, t, d, opponents);
                const double gain = dev - truth;
                rep.max_gain = std::max(rep.max_gain, gain);
                if (gain > kTol) {
                    rep.passed = false;
                    if (rep.violations.size() < 16) {
                        rep.violations.push_back({opponents, t, d, truth, dev});
                    }
                } else if (std::fabs(gain) <= kTol) {
                    if (rep.binding_ties.size() < 16) {
                        rep.binding_ties.push_back({opponents, t, d, truth, dev});
                    }
                }
            }
        }
        // advance the opponent profile odometer
        done = true;
        for (int j = 0; j < opp_count; ++j) {
            if (++idx[j] < type_space.size()) {
                done = false;
                break;
            }
            idx[j] = 0;
        }
        if (opp_count == 0) done = true;
    }
    return rep;
}

double enumerate_expected_revenue(const Mechanism& mech, const std::vector<double>& values,
                                  const std::vector<double>& probs, int n) {
    if (values.size() != probs.size() || values.empty()) {
        throw std::invalid_argument("enumerate_expected_revenue: values/probs mismatch");
    }
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> bids(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    while (true) {
        double p = 1.0;
        for (int j = 0; j < n; ++j) {
            bids[j] = values[idx[j]];
            p *= probs[idx[j]];
        }
        const auto shares = mech.allocation(bids);
        double pay = 0.0;
        for (const auto& s : shares) pay += s.win_prob * s.payment_if_win;
        total += p * pay;
        int j = 0;
        for (; j < n; ++j) {
            if (++idx[j] < values.size()) break;
            idx[j] = 0;
        }
        if (j == n) break;
    }
    return total;
}

}  // namespace reserve
