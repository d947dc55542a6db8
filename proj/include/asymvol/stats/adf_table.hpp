#pragma once

// Finite-sample quantiles of the Dickey-Fuller tau statistic as response
// surfaces q(T) = c0 + c1/T + c2/T^2 + c3/T^3 in the regression sample size T.
//
// Rows at 1%, 5% and 10% are MacKinnon (2010), "Critical Values for
// Cointegration Tests", Queen's Economics Department Working Paper 1227,
// Table 2 (N = 1). All other rows were fitted by tools/gen_adf_table.py
// (400k Gaussian random walks at each of T = 20..1000); its own 1/5/10%
// fits agree with MacKinnon to within 0.01.

#include <array>

namespace asymvol::stats::adf_table {

struct Row {
    double prob;
    double c0;
    double c1;
    double c2;
    double c3;
};

inline constexpr std::array<Row, 19> kNone{{
    {0.001, -3.28164, -6.2132, -10.086, 0.0},
    {0.005, -2.79983, -2.9994, -9.946, 0.0},
    {0.010, -2.56574, -2.2358, -3.627, 0.0},
    {0.025, -2.23020, -0.5010, -8.488, 0.0},
    {0.050, -1.94100, -0.2686, -3.365, 31.223},
    {0.100, -1.61682, 0.2656, -2.714, 25.364},
    {0.200, -1.23352, 0.5706, 0.229, 0.0},
    {0.300, -0.96428, 0.7676, -1.965, 0.0},
    {0.400, -0.73244, 0.7914, -3.124, 0.0},
    {0.500, -0.50013, 0.7658, -1.649, 0.0},
    {0.600, -0.23995, 0.7918, -1.138, 0.0},
    {0.700, 0.05398, 0.8014, -0.798, 0.0},
    {0.800, 0.40287, 0.8584, -1.988, 0.0},
    {0.900, 0.88733, 0.9768, -1.122, 0.0},
    {0.950, 1.28160, 1.3364, -0.385, 0.0},
    {0.975, 1.62305, 1.8730, 1.336, 0.0},
    {0.990, 2.01351, 3.3511, -3.003, 0.0},
    {0.995, 2.27752, 3.6696, 14.308, 0.0},
    {0.999, 2.82547, 5.0067, 50.959, 0.0},
}};

inline constexpr std::array<Row, 19> kIntercept{{
    {0.001, -4.10382, -11.4689, -73.692, 0.0},
    {0.005, -3.65378, -6.8213, -56.992, 0.0},
    {0.010, -3.43035, -6.5393, -16.786, -79.433},
    {0.025, -3.12594, -4.2315, -10.809, 0.0},
    {0.050, -2.86154, -2.8903, -4.234, -40.040},
    {0.100, -2.56677, -1.5384, -2.809, 0.0},
    {0.200, -2.21783, -0.3518, -1.029, 0.0},
    {0.300, -1.97032, 0.1692, 0.344, 0.0},
    {0.400, -1.76047, 0.4162, 2.682, 0.0},
    {0.500, -1.56459, 0.6296, 3.515, 0.0},
    {0.600, -1.36589, 0.8580, 2.495, 0.0},
    {0.700, -1.14445, 1.0860, 2.841, 0.0},
    {0.800, -0.86387, 1.3800, 2.605, 0.0},
    {0.900, -0.43713, 1.4232, 6.519, 0.0},
    {0.950, -0.07755, 1.7918, 3.640, 0.0},
    {0.975, 0.24069, 1.5851, 12.138, 0.0},
    {0.990, 0.60845, 2.1479, 11.563, 0.0},
    {0.995, 0.85989, 2.2351, 18.441, 0.0},
    {0.999, 1.37513, 3.3637, 26.376, 0.0},
}};

constexpr double evaluate(const Row& row, double T) noexcept {
    return row.c0 + row.c1 / T + row.c2 / (T * T) + row.c3 / (T * T * T);
}

}  // namespace asymvol::stats::adf_table
