#pragma once

#include <cstdint>
#include <optional>

#include "reserve/distribution.hpp"
#include "reserve/mechanisms.hpp"

namespace reserve {

struct SimReport {
    double mean_revenue = 0.0;
    double std_error = 0.0;  // sample std / sqrt(trials); 0 for trials < 2
    long long trials = 0;
    std::uint64_t seed = 0;
    std::optional<double> analytic_ref;
    std::optional<double> z_score;
    long long rejected = 0;  // profiles the mechanism refused (counted as zero revenue)
};

/// Second-price auction with a reserve drawn from Q and n i.i.d. values from
/// F. Per trial: the reserve, then the n values, then (only on a top-bid tie)
/// one tie-break variate, all from the trial's own substream, so reports are
/// bit-identical for a given seed no matter how trials are batched.
SimReport simulate_auction(const PiecewiseCdf& f, const PiecewiseCdf& q, int n, long long trials,
                           std::uint64_t seed, TieSale tie_sale = TieSale::strict,
                           std::optional<double> analytic_ref = std::nullopt);

/// Same trial scheme with an arbitrary outcome function and no reserve draw.
SimReport simulate_mechanism(const Mechanism& mech, const PiecewiseCdf& f, int n, long long trials,
                             std::uint64_t seed,
                             std::optional<double> analytic_ref = std::nullopt);

}  // namespace reserve
