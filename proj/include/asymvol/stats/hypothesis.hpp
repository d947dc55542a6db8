#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>

#include "asymvol/error.hpp"
#include "asymvol/stats/descriptive.hpp"
#include "asymvol/stats/distributions.hpp"

namespace asymvol::stats {

/// Outcome of a hypothesis test. `p_value` is NaN when undefined (for
/// instance a degenerate input recorded rather than thrown).
struct TestResult {
    std::string name;
    double statistic = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
    std::map<std::string, double> detail;
    bool degenerate = false;
    std::string note;

    static TestResult degenerate_result(std::string name, std::string reason) {
        TestResult r;
        r.name = std::move(name);
        r.degenerate = true;
        r.note = std::move(reason);
        return r;
    }
};

/// One-sample Student-t test of H0: mean = 0, two-sided.
inline TestResult t_test_zero_mean(std::span<const double> x) {
    if (x.size() < 2) fail(ErrorKind::too_short, "t-test needs at least 2 observations");
    const double m = mean(x);
    const double var = sample_variance(x);
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::fabs(v));
    const double sd = std::sqrt(var);
    if (!(sd > 1e-13 * scale)) fail(ErrorKind::degenerate, "t-test on a constant sample");
    const double n = static_cast<double>(x.size());
    TestResult r;
    r.name = "t_test_zero_mean";
    r.statistic = m / (sd / std::sqrt(n));
    r.p_value = student_t_two_sided_p(r.statistic, n - 1.0);
    r.detail = {{"n", n}, {"mean", m}, {"sd", sd}, {"dof", n - 1.0}};
    return r;
}

/// Box-Pierce portmanteau test: Q = n * sum_{k<=lags} rho_k^2 ~ chi2(lags).
inline TestResult box_pierce(std::span<const double> x, std::size_t lags) {
    if (lags == 0) fail(ErrorKind::invalid_argument, "box_pierce: lags must be positive");
    if (x.size() <= lags + 1) fail(ErrorKind::too_short, "box_pierce: series too short for lag count");
    const double m = mean(x);
    double scale = 0.0;
    double ss = 0.0;
    for (double v : x) {
        scale = std::max(scale, std::fabs(v));
        ss += (v - m) * (v - m);
    }
    if (!(std::sqrt(ss / static_cast<double>(x.size())) > 1e-13 * scale)) {
        fail(ErrorKind::degenerate, "box_pierce: zero variance");
    }
    const double n = static_cast<double>(x.size());
    double q = 0.0;
    TestResult r;
    r.name = "box_pierce";
    for (std::size_t k = 1; k <= lags; ++k) {
        const double rho = autocorrelation(x, k);
        r.detail["rho_" + std::to_string(k)] = rho;
        q += rho * rho;
    }
    r.statistic = n * q;
    r.p_value = chi_square_sf(r.statistic, static_cast<double>(lags));
    r.detail["lags"] = static_cast<double>(lags);
    r.detail["n"] = n;
    return r;
}

}  // namespace asymvol::stats
