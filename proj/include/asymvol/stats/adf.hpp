#pragma once

/**
 * @file adf.hpp
 * @brief Augmented Dickey-Fuller unit-root test.
 *
 * Test regression, for t = p+1 .. n-1:
 *   dx_t = (alpha) + gamma x_{t-1} + sum_{i=1..p} phi_i dx_{t-i} + e_t
 * The statistic is the OLS t-ratio on gamma; H0 is gamma = 0 (unit root).
 *
 * p-values interpolate linearly between the tabulated tau quantiles of
 * adf_table.hpp evaluated at the regression sample size, and are clamped to
 * [0.001, 0.999]; detail["p_clamped"] is 1 when the clamp applied.
 */

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "asymvol/error.hpp"
#include "asymvol/stats/adf_table.hpp"
#include "asymvol/stats/hypothesis.hpp"
#include "asymvol/stats/ols.hpp"

namespace asymvol::stats {

enum class AdfDeterministic { none, intercept };

/// Quantile curve of tau at regression sample size T, ascending in probability.
inline std::vector<std::pair<double, double>> adf_quantiles(AdfDeterministic det, double T) {
    const auto& rows = det == AdfDeterministic::none ? adf_table::kNone : adf_table::kIntercept;
    std::vector<std::pair<double, double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        double q = adf_table::evaluate(row, T);
        // Tiny samples can bend neighbouring surfaces past each other.
        if (!out.empty()) q = std::max(q, out.back().second);
        out.emplace_back(row.prob, q);
    }
    return out;
}

inline double adf_critical_value(AdfDeterministic det, double T, double level) {
    for (const auto& [p, q] : adf_quantiles(det, T)) {
        if (std::fabs(p - level) < 1e-12) return q;
    }
    fail(ErrorKind::invalid_argument, "adf: no tabulated critical value at level " + std::to_string(level));
}

/// Returns {p, clamped}.
inline std::pair<double, bool> adf_p_value(AdfDeterministic det, double T, double tau) {
    const auto curve = adf_quantiles(det, T);
    if (tau <= curve.front().second) return {curve.front().first, true};
    if (tau >= curve.back().second) return {curve.back().first, true};
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto [p1, q1] = curve[i];
        if (tau <= q1) {
            const auto [p0, q0] = curve[i - 1];
            if (q1 == q0) return {p0, false};
            return {p0 + (tau - q0) / (q1 - q0) * (p1 - p0), false};
        }
    }
    return {curve.back().first, true};
}

inline TestResult adf(std::span<const double> x, std::size_t lag_order,
                      AdfDeterministic det = AdfDeterministic::intercept) {
    const std::size_t n = x.size();
    const std::size_t with_const = det == AdfDeterministic::intercept ? 1 : 0;
    const std::size_t k = 1 + lag_order + with_const;
    if (n <= lag_order + 2 + with_const || n - lag_order - 1 <= k) {
        fail(ErrorKind::too_short, "adf: " + std::to_string(n) + " observations for lag order " +
                                       std::to_string(lag_order));
    }
    const std::size_t nobs = n - lag_order - 1;

    std::vector<double> dy(nobs);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(nobs), static_cast<Eigen::Index>(1 + lag_order));
    std::vector<std::string> names{"level(t-1)"};
    for (std::size_t i = 1; i <= lag_order; ++i) names.push_back("diff(t-" + std::to_string(i) + ")");
    for (std::size_t row = 0; row < nobs; ++row) {
        const std::size_t t = row + lag_order + 1;
        dy[row] = x[t] - x[t - 1];
        const auto r = static_cast<Eigen::Index>(row);
        X(r, 0) = x[t - 1];
        for (std::size_t i = 1; i <= lag_order; ++i) {
            X(r, static_cast<Eigen::Index>(i)) = x[t - i] - x[t - i - 1];
        }
    }

    const auto fit = ols(dy, X, with_const == 1, names);
    const std::size_t gamma_idx = with_const;
    if (!(fit.se[gamma_idx] > 0.0)) fail(ErrorKind::degenerate, "adf: exact fit, t-ratio undefined");

    const double T = static_cast<double>(nobs);
    TestResult r;
    r.name = "adf";
    r.statistic = fit.t_stat[gamma_idx];
    const auto [p, clamped] = adf_p_value(det, T, r.statistic);
    r.p_value = p;
    r.detail = {
        {"lags", static_cast<double>(lag_order)},
        {"nobs", T},
        {"intercept", static_cast<double>(with_const)},
        {"gamma", fit.coef[gamma_idx]},
        {"cv_1pct", adf_critical_value(det, T, 0.01)},
        {"cv_5pct", adf_critical_value(det, T, 0.05)},
        {"cv_10pct", adf_critical_value(det, T, 0.10)},
        {"p_clamped", clamped ? 1.0 : 0.0},
    };
    return r;
}

}  // namespace asymvol::stats
