#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "reserve/mechanisms.hpp"

using namespace reserve;

TEST_CASE("second-price outcomes") {
    RandomStream rng(3);
    const MechanismOutcome bound = spa_outcome({0.7, 0.4}, 0.5, rng);
    CHECK(bound.winner == 0);
    CHECK(bound.payment == doctest::Approx(0.5));

    const MechanismOutcome no_sale = spa_outcome({0.7, 0.4}, 0.7, rng);
    CHECK_FALSE(no_sale.winner.has_value());
    CHECK(no_sale.payment == 0.0);

    const MechanismOutcome inclusive = spa_outcome({0.7, 0.4}, 0.7, rng, TieSale::inclusive);
    CHECK(inclusive.winner == 0);
    CHECK(inclusive.payment == doctest::Approx(0.7));

    // Tied top bids: winner uniform between them, payment the shared top.
    int first = 0;
    for (int i = 0; i < 2000; ++i) {
        const MechanismOutcome out = spa_outcome({1.0, 1.0, 5.0 / 9.0}, 0.0, rng);
        REQUIRE(out.winner.has_value());
        CHECK(out.payment == doctest::Approx(1.0));
        CHECK(*out.winner <= 1);
        if (*out.winner == 0) ++first;
    }
    CHECK(first > 800);
    CHECK(first < 1200);

    CHECK_THROWS_AS(spa_outcome({}, 0.0, rng), std::invalid_argument);
}

TEST_CASE("ironed mechanism payments follow the menu") {
    RandomStream rng(5);
    const double third = 5.0 / 9.0;
    CHECK(ironed_outcome({third, third, third}, rng).payment == doctest::Approx(third));
    CHECK(ironed_outcome({1.0, 1.0, third}, rng).payment == doctest::Approx(1.0));
    const MechanismOutcome one_high = ironed_outcome({1.0, third, third}, rng);
    CHECK(one_high.winner == 0);
    CHECK(one_high.payment == doctest::Approx(23.0 / 27.0));

    // Off-menu reports map to the nearest menu entry below, or are ignored.
    CHECK(ironed_outcome({0.8, 0.2, 0.1}, rng).payment == doctest::Approx(third));
    CHECK(ironed_outcome({1.7, 0.9, 0.2}, rng).payment == doctest::Approx(23.0 / 27.0));
    CHECK_FALSE(ironed_outcome({0.1, 0.2, 0.3}, rng).winner.has_value());
}

TEST_CASE("exact enumerated revenue of the ironed mechanism is 3/4") {
    const std::vector<double> values{5.0 / 9.0, 1.0};
    const std::vector<double> probs{0.75, 0.25};
    const double rev = enumerate_expected_revenue(IronedMechanism(), values, probs, 3);
    CHECK(std::fabs(rev - 0.75) <= 1e-12);

    const double spa_rev = enumerate_expected_revenue(SecondPriceAuction(0.0), values, probs, 3);
    CHECK(std::fabs(spa_rev - 0.625) <= 1e-12);
}

TEST_CASE("individual rationality on enumerated profiles") {
    const std::vector<double> space{0.3, 5.0 / 9.0, 0.8, 1.0, 1.3};
    const IronedMechanism ironed;
    const SecondPriceAuction spa(0.45);
    for (double b1 : space) {
        for (double b2 : space) {
            for (double b3 : space) {
                const std::vector<double> bids{b1, b2, b3};
                for (const Mechanism* mech :
                     std::initializer_list<const Mechanism*>{&ironed, &spa}) {
                    const auto shares = mech->allocation(bids);
                    for (std::size_t i = 0; i < bids.size(); ++i) {
                        if (shares[i].win_prob > 0.0) {
                            CHECK(shares[i].payment_if_win <= bids[i] + 1e-12);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("zero-reserve second price matches the classical rule") {
    const std::vector<double> space{0.1, 0.35, 0.5, 0.72, 0.9};
    const SecondPriceAuction spa(0.0);
    for (double b1 : space) {
        for (double b2 : space) {
            for (double b3 : space) {
                const std::vector<double> bids{b1, b2, b3};
                std::vector<double> sorted = bids;
                std::sort(sorted.rbegin(), sorted.rend());
                const auto shares = spa.allocation(bids);
                double total_prob = 0.0;
                for (std::size_t i = 0; i < bids.size(); ++i) {
                    total_prob += shares[i].win_prob;
                    if (shares[i].win_prob > 0.0) {
                        CHECK(bids[i] == sorted[0]);
                        CHECK(shares[i].payment_if_win == doctest::Approx(sorted[1]));
                    }
                }
                CHECK(total_prob == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("dominant-strategy checks") {
    const TruthfulnessReport ironed = truthfulness_check(IronedMechanism(), {5.0 / 9.0, 1.0}, 3);
    CHECK(ironed.passed);
    // The binding deviation: a high type shading down against two low types
    // is exactly indifferent at utility 4/27.
    bool found_binding = false;
    for (const auto& tie : ironed.binding_ties) {
        if (tie.true_type == 1.0 && std::fabs(tie.truth_utility - 4.0 / 27.0) < 1e-12) {
            found_binding = true;
        }
    }
    CHECK(found_binding);

    const TruthfulnessReport spa =
        truthfulness_check(SecondPriceAuction(0.5), {0.4, 0.7, 1.0}, 2);
    CHECK(spa.passed);

    const TruthfulnessReport fp = truthfulness_check(FirstPriceAuction(), {0.4, 0.7, 1.0}, 2);
    CHECK_FALSE(fp.passed);
    REQUIRE_FALSE(fp.violations.empty());
    const DeviationCase& v = fp.violations.front();
    CHECK(v.deviation_utility > v.truth_utility + 1e-12);
}
