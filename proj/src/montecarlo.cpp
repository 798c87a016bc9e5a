#include "reserve/montecarlo.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace reserve {

namespace {

class Welford {
  public:
    void add(double x) {
        ++count_;
        const double d = x - mean_;
        mean_ += d / count_;
        m2_ += d * (x - mean_);
    }
    double mean() const { return mean_; }
    double std_error() const {
        if (count_ < 2) return 0.0;
        return std::sqrt(m2_ / (count_ - 1)) / std::sqrt(static_cast<double>(count_));
    }

  private:
    long long count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

void finalize(SimReport& rep, const Welford& acc, long long trials, std::uint64_t seed,
              std::optional<double> analytic_ref) {
    rep.mean_revenue = acc.mean();
    rep.std_error = acc.std_error();
    rep.trials = trials;
    rep.seed = seed;
    rep.analytic_ref = analytic_ref;
    if (analytic_ref.has_value() && rep.std_error > 0.0) {
        rep.z_score = (rep.mean_revenue - *analytic_ref) / rep.std_error;
    }
}

}  // namespace

SimReport simulate_auction(const PiecewiseCdf& f, const PiecewiseCdf& q, int n, long long trials,
                           std::uint64_t seed, TieSale tie_sale,
                           std::optional<double> analytic_ref) {
    if (trials < 1) throw std::invalid_argument("simulate_auction: trials >= 1 required");
    if (n < 1) throw std::invalid_argument("simulate_auction: n >= 1 required");
    RandomStream base(seed);
    Welford acc;
    std::vector<double> values(static_cast<std::size_t>(n));
    for (long long t = 0; t < trials; ++t) {
        RandomStream rng = base.substream(static_cast<std::uint64_t>(t));
        const double r = sample(q, rng);
        double top = -1.0, second = 0.0;
        int ties = 0;
        for (int i = 0; i < n; ++i) {
            const double v = sample(f, rng);
            values[static_cast<std::size_t>(i)] = v;
            if (v > top) {
                second = top < 0.0 ? 0.0 : top;
                top = v;
                ties = 1;
            } else if (v == top) {
                ++ties;
                second = top;
            } else if (v > second) {
                second = v;
            }
        }
        const bool sale = tie_sale == TieSale::strict ? top > r : top >= r;
        double revenue = 0.0;
        if (sale) {
            if (ties > 1) rng.next_double();  // tie-break draw, winner identity only
            revenue = std::max(r, second);
        }
        acc.add(revenue);
    }
    SimReport rep;
    finalize(rep, acc, trials, seed, analytic_ref);
    return rep;
}

SimReport simulate_mechanism(const Mechanism& mech, const PiecewiseCdf& f, int n, long long trials,
                             std::uint64_t seed, std::optional<double> analytic_ref) {
    if (trials < 1) throw std::invalid_argument("simulate_mechanism: trials >= 1 required");
    RandomStream base(seed);
    Welford acc;
    SimReport rep;
    std::vector<double> bids(static_cast<std::size_t>(n));
    for (long long t = 0; t < trials; ++t) {
        RandomStream rng = base.substream(static_cast<std::uint64_t>(t));
        // Slot 0 of every trial belongs to the environment draw (the reserve
        // in simulate_auction); burning it here keeps the value profiles of
        // both simulators identical for the same seed.
        rng.next_double();
        for (int i = 0; i < n; ++i) bids[static_cast<std::size_t>(i)] = sample(f, rng);
        double revenue = 0.0;
        try {
            revenue = mech.outcome(bids, rng).payment;
        } catch (const std::exception&) {
            ++rep.rejected;
        }
        acc.add(revenue);
    }
    finalize(rep, acc, trials, seed, analytic_ref);
    return rep;
}

}  // namespace reserve
