#pragma once
#include <algorithm>
#include <cmath>
#include <vector>

namespace airq {

// Percentile by linear interpolation between closest order statistics
// (inclusive convention): rank h = (n - 1) * p. Takes values by copy; sorts.
inline double percentile_linear(std::vector<double> values, double p) {
    const std::size_t n = values.size();
    if (n == 0) return std::nan("");
    std::sort(values.begin(), values.end());
    if (n == 1) return values[0];
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return values[n - 1];
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace airq
