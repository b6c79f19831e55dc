#pragma once

#include <cmath>

namespace ascension {

// 0 for x <= 0, 1 for x >= 1, C-infinity, increasing
inline double smooth_step(double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

// 1 on [-1/4, 1/4], 0 outside (-1/2, 1/2)
inline double bump(double t) { return smooth_step(4.0 * (0.5 - std::abs(t))); }

}  // namespace ascension
