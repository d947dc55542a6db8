#pragma once

/**
 * @file ols.hpp
 * @brief Ordinary least squares with classical inference.
 *
 * Coefficients come from a column-pivoted Householder QR of the design
 * matrix; the covariance is sigma^2 (X'X)^{-1} with sigma^2 = e'e/(n-k),
 * assembled from the triangular factor. p-values are two-sided Student-t with
 * n-k degrees of freedom. Information criteria use the concentrated Gaussian
 * log-likelihood with constants dropped:
 *   AIC = n ln(e'e/n) + 2k,  BIC = n ln(e'e/n) + k ln(n).
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asymvol/error.hpp"
#include "asymvol/stats/distributions.hpp"

namespace asymvol::stats {

struct RegressionResult {
    std::vector<std::string> names;
    std::vector<double> coef;
    std::vector<double> se;
    std::vector<double> t_stat;
    std::vector<double> p_value;
    std::vector<double> residuals;
    std::size_t n = 0;
    std::size_t k = 0;  ///< regressors including the intercept when present
    bool intercept = false;
    double ssr = 0.0;
    double r2 = 0.0;
    double aic = 0.0;
    double bic = 0.0;

    [[nodiscard]] std::size_t dof() const noexcept { return n - k; }

    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return i;
        }
        return std::nullopt;
    }
};

/// Relative pivot threshold below which a design column counts as collinear.
inline constexpr double kRankTolerance = 1e-10;

/**
 * Fits y = X b (+ intercept). `X` excludes the intercept column; with
 * `intercept` set, a leading column of ones is added and named "Intercept".
 * `names` labels the columns of `X` (defaults x1, x2, ...).
 *
 * Throws insufficient_data unless rows > columns, and rank_deficient when
 * the design is not of full column rank.
 *
 * A coefficient whose standard error is exactly zero (perfect fit) gets a
 * NaN t-statistic and p-value.
 */
inline RegressionResult ols(std::span<const double> y, const Eigen::MatrixXd& X, bool intercept,
                            std::vector<std::string> names = {}) {
    const auto n = static_cast<Eigen::Index>(y.size());
    if (X.rows() != n) {
        fail(ErrorKind::invalid_argument, "ols: design has " + std::to_string(X.rows()) +
                                              " rows but y has " + std::to_string(n));
    }
    const Eigen::Index k = X.cols() + (intercept ? 1 : 0);
    if (k == 0) fail(ErrorKind::invalid_argument, "ols: empty design");
    if (n <= k) {
        fail(ErrorKind::insufficient_data, "ols: " + std::to_string(n) + " observations for " +
                                               std::to_string(k) + " regressors");
    }

    Eigen::MatrixXd A(n, k);
    if (intercept) A.col(0).setOnes();
    A.rightCols(X.cols()) = X;
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

    if (names.empty()) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
    }
    if (static_cast<Eigen::Index>(names.size()) != X.cols()) {
        fail(ErrorKind::invalid_argument, "ols: names/columns mismatch");
    }
    if (intercept) names.insert(names.begin(), "Intercept");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(kRankTolerance);
    if (qr.rank() < k) {
        // Report the columns the pivoting pushed past the numerical rank.
        std::string dropped;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index j = qr.rank(); j < k; ++j) {
            if (!dropped.empty()) dropped += ", ";
            dropped += names[static_cast<std::size_t>(perm(j))];
        }
        fail(ErrorKind::rank_deficient, "ols: design rank " + std::to_string(qr.rank()) + " < " +
                                            std::to_string(k) + " (collinear: " + dropped + ")");
    }

    const Eigen::VectorXd beta = qr.solve(yv);
    const Eigen::VectorXd resid = yv - A * beta;

    const Eigen::MatrixXd R =
        qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd inv_perm = Rinv * Rinv.transpose();
    const auto& perm = qr.colsPermutation();
    const Eigen::MatrixXd xtx_inv = perm * inv_perm * perm.transpose();

    RegressionResult out;
    out.names = std::move(names);
    out.n = static_cast<std::size_t>(n);
    out.k = static_cast<std::size_t>(k);
    out.intercept = intercept;
    out.ssr = resid.squaredNorm();
    const double dof = static_cast<double>(n - k);
    const double sigma2 = out.ssr / dof;

    for (Eigen::Index j = 0; j < k; ++j) {
        const double c = beta(j);
        const double s = std::sqrt(std::max(0.0, sigma2 * xtx_inv(j, j)));
        out.coef.push_back(c);
        out.se.push_back(s);
        if (s > 0.0) {
            const double t = c / s;
            out.t_stat.push_back(t);
            out.p_value.push_back(student_t_two_sided_p(t, dof));
        } else {
            out.t_stat.push_back(std::numeric_limits<double>::quiet_NaN());
            out.p_value.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    out.residuals.assign(resid.data(), resid.data() + n);

    double tss = 0.0;
    if (intercept) {
        const double ybar = yv.mean();
        tss = (yv.array() - ybar).square().sum();
    } else {
        tss = yv.squaredNorm();
    }
    if (tss > 0.0) {
        out.r2 = std::clamp(1.0 - out.ssr / tss, 0.0, 1.0);
    } else {
        out.r2 = 1.0;
    }

    const double nd = static_cast<double>(n);
    const double ll_term = nd * std::log(out.ssr / nd);
    out.aic = ll_term + 2.0 * static_cast<double>(k);
    out.bic = ll_term + static_cast<double>(k) * std::log(nd);
    return out;
}

/// Convenience: design given as columns.
inline RegressionResult ols(std::span<const double> y, const std::vector<std::vector<double>>& columns,
                            bool intercept, std::vector<std::string> names = {}) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != y.size()) fail(ErrorKind::invalid_argument, "ols: ragged design columns");
        for (std::size_t i = 0; i < y.size(); ++i) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns[j][i];
        }
    }
    return ols(y, X, intercept, std::move(names));
}

}  // namespace asymvol::stats
