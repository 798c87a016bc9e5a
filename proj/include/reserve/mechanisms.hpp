#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reserve/random.hpp"

namespace reserve {

/// Whether a bid exactly equal to the reserve buys the item. The default is
/// strict (sale only on a strictly higher bid), which is what makes worst-case
/// distributions attainable.
enum class TieSale { strict, inclusive };

struct MechanismOutcome {
    std::optional<int> winner;  // bidder index, absent when no sale
    double payment = 0.0;       // 0 iff no sale
};

/// One bidder's slice of a (possibly randomized) allocation.
struct BidderShare {
    double win_prob = 0.0;
    double payment_if_win = 0.0;
};

/// Direct mechanism on bid profiles. `allocation` returns the exact outcome
/// distribution (tie-breaking is uniform over tied winners), which the
/// truthfulness checker and revenue enumeration consume without sampling;
/// `outcome` samples one realization, consuming a variate only on real ties.
class Mechanism {
  public:
    virtual ~Mechanism() = default;
    virtual std::vector<BidderShare> allocation(const std::vector<double>& bids) const = 0;
    virtual std::string name() const = 0;
    MechanismOutcome outcome(const std::vector<double>& bids, RandomStream& rng) const;
};

/// Second-price auction with reserve: sale iff the top bid clears the
/// reserve, winner uniform over the top bidders, payment
/// max(reserve, second-highest bid) (0 for the missing rival of a lone
/// bidder).
class SecondPriceAuction final : public Mechanism {
  public:
    explicit SecondPriceAuction(double reserve, TieSale tie_sale = TieSale::strict)
        : reserve_(reserve), tie_sale_(tie_sale) {}
    std::vector<BidderShare> allocation(const std::vector<double>& bids) const override;
    std::string name() const override { return "second-price"; }
    double reserve() const { return reserve_; }

  private:
    double reserve_;
    TieSale tie_sale_;
};

/// Three-bidder posted-menu mechanism on the effective type space
/// {ignore, 5/9, 1}: bids below 5/9 are ignored, bids in [5/9, 1) count as
/// 5/9, bids at or above 1 count as 1. Winner uniform among the highest
/// effective bidders; payment 5/9 when no effective 1 exists, 23/27 when
/// exactly one does, and 1 when two or more do.
class IronedMechanism final : public Mechanism {
  public:
    std::vector<BidderShare> allocation(const std::vector<double>& bids) const override;
    std::string name() const override { return "ironed"; }
};

/// Pay-your-bid control used to show the checker catches non-truthful rules.
class FirstPriceAuction final : public Mechanism {
  public:
    explicit FirstPriceAuction(double reserve = 0.0) : reserve_(reserve) {}
    std::vector<BidderShare> allocation(const std::vector<double>& bids) const override;
    std::string name() const override { return "first-price"; }

  private:
    double reserve_;
};

MechanismOutcome spa_outcome(const std::vector<double>& bids, double reserve, RandomStream& rng,
                             TieSale tie_sale = TieSale::strict);
MechanismOutcome ironed_outcome(const std::vector<double>& bids, RandomStream& rng);

struct DeviationCase {
    std::vector<double> opponents;
    double true_type = 0.0;
    double report = 0.0;
    double truth_utility = 0.0;
    double deviation_utility = 0.0;
};

struct TruthfulnessReport {
    bool passed = false;
    double max_gain = 0.0;  // best improvement any deviation achieves
    std::vector<DeviationCase> violations;
    std::vector<DeviationCase> binding_ties;  // deviations exactly indifferent
};

/// Exhaustive dominant-strategy check over every opponent profile from the
/// type space, every true type, and every misreport in the type space plus
/// below-minimum and above-maximum probes. Expected utilities are exact
/// (tie-breaking enumerated, no sampling); tolerance 1e-12.
TruthfulnessReport truthfulness_check(const Mechanism& mech, const std::vector<double>& type_space,
                                      int n);

/// Exact expected revenue when each of n bidders draws independently from the
/// finite value distribution (values[i] w.p. probs[i]); enumerates all
/// profiles.
double enumerate_expected_revenue(const Mechanism& mech, const std::vector<double>& values,
                                  const std::vector<double>& probs, int n);

}  // namespace reserve
