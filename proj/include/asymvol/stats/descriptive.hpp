#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "asymvol/error.hpp"

namespace asymvol::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) fail(ErrorKind::too_short, "mean of empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample variance with the n-1 divisor.
inline double sample_variance(std::span<const double> x) {
    if (x.size() < 2) fail(ErrorKind::too_short, "variance needs at least 2 observations");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

/// Order-statistic quantile with linear interpolation between neighbours
/// (position h = (n-1)q over the sorted sample, the "type 7" rule).
inline double quantile(std::span<const double> x, double q) {
    if (x.empty()) fail(ErrorKind::too_short, "quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::invalid_argument, "quantile level outside [0, 1]");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Sample autocorrelation at `lag` using the divide-by-n covariance.
inline double autocorrelation(std::span<const double> x, std::size_t lag) {
    if (x.size() <= lag) fail(ErrorKind::too_short, "autocorrelation lag exceeds sample");
    const double m = mean(x);
    double denom = 0.0;
    for (double v : x) denom += (v - m) * (v - m);
    if (!(denom > 0.0)) fail(ErrorKind::degenerate, "autocorrelation of a constant series");
    double num = 0.0;
    for (std::size_t t = lag; t < x.size(); ++t) num += (x[t] - m) * (x[t - lag] - m);
    return num / denom;
}

}  // namespace asymvol::stats
