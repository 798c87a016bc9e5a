#pragma once

// Test-side oracles, written independently of the library code paths they
// cross-check (plain loops, no shared helpers).

#include <cmath>
#include <functional>
#include <limits>

namespace oracles {

// Root of x + x log(vbar) - x log(x) = mu by plain interval halving.
inline double uv_mean_bound(double mu, double vbar) {
    double lo = 1e-18 * vbar, hi = vbar;
    for (int it = 0; it < 400; ++it) {
        const double x = 0.5 * (lo + hi);
        const double g = x + x * std::log(vbar) - x * std::log(x);
        if (g < mu)
            lo = x;
        else
            hi = x;
    }
    return 0.5 * (lo + hi);
}

// Root of x (n - 1/(n-1) + log(vbar/x)) = (n-1)^2 mu, NaN when none exists
// at or below vbar.
inline double uv_multi(int n, double mu, double vbar) {
    const double c = n - 1.0 / (n - 1.0);
    const double target = (n - 1.0) * (n - 1.0) * mu;
    if (c * vbar < target) return std::numeric_limits<double>::quiet_NaN();
    double lo = 1e-18 * vbar, hi = vbar;
    for (int it = 0; it < 400; ++it) {
        const double x = 0.5 * (lo + hi);
        if (x * (c + std::log(vbar / x)) < target)
            lo = x;
        else
            hi = x;
    }
    return 0.5 * (lo + hi);
}

// Fixed-step composite Simpson rule; deliberately simpler than the adaptive
// quadrature inside the library.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const int m = 2 * panels;
    const double h = (b - a) / m;
    double acc = f(a) + f(b);
    for (int i = 1; i < m; ++i) {
        acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

}  // namespace oracles
