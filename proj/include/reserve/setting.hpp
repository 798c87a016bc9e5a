#pragma once

#include <stdexcept>

namespace reserve {

/// Known parameters of the game instance: bidder count, mean value, and the
/// upper bound of the value support.
struct ParametricSetting {
    int n = 2;
    double mu = 0.0;
    double vbar = 0.0;

    void require_valid() const {
        if (n < 1) throw std::invalid_argument("setting: n must be >= 1");
        if (!(mu > 0.0 && mu < vbar)) {
            throw std::invalid_argument("setting: need 0 < mu < vbar");
        }
    }
};

}  // namespace reserve
