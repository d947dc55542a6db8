#pragma once

/**
 * @file asymmetry.hpp
 * @brief Cointegration battery and the asymmetric-volatility regressions.
 *
 * Each table regression on grid cell t (t >= 1) is
 *   V(t) = mu + b1 s(t-1) + b2 r(t) + b3 V(t-1) + b4 I(t-1) s(t-1)
 * where V is RV or IV, s is the shock (r_prev, or r_last_day for Table 3),
 * I(t-1) = 1 iff s(t-1) < 0, and V(t-1) is the adjacent grid cell's value.
 * Coefficients are in vol points per unit log return, hence magnitudes near
 * 100 for percentage-point volatilities.
 */

#include <cmath>
#include <string>
#include <vector>

#include "asymvol/error.hpp"
#include "asymvol/stats/adf.hpp"
#include "asymvol/stats/hypothesis.hpp"
#include "asymvol/stats/ols.hpp"
#include "asymvol/volatility.hpp"

namespace asymvol {

using stats::RegressionResult;
using stats::TestResult;

struct CointegrationReport {
    std::size_t n = 0;
    double slope_no_intercept = 0.0;
    double slope_no_intercept_se = 0.0;
    double slope_no_intercept_p = 0.0;
    double slope_with_intercept = 0.0;
    double intercept = 0.0;
    double intercept_p = 0.0;
    double aic_delta = 0.0;  ///< AIC(with intercept) - AIC(without)
    double bic_delta = 0.0;  ///< BIC(with intercept) - BIC(without)
    TestResult residual_t;
    TestResult residual_bp;
    TestResult residual_adf;
};

struct BatteryOptions {
    std::size_t bp_lag = 1;
    std::size_t adf_lag = 6;
    stats::AdfDeterministic adf_deterministic = stats::AdfDeterministic::none;
};

inline constexpr std::size_t kMinBatteryObservations = 30;

/// Fits RV = b IV + e and RV = a + b IV + e and tests the no-intercept
/// residual for zero mean, autocorrelation and a unit root. A residual that
/// is identically zero up to rounding marks all three tests degenerate.
inline CointegrationReport cointegration_battery(const VolGrid& grid, const BatteryOptions& opt = {}) {
    if (grid.size() < kMinBatteryObservations) {
        fail(ErrorKind::insufficient_data, "cointegration_battery: " + std::to_string(grid.size()) +
                                               " observations; need " + std::to_string(kMinBatteryObservations));
    }
    const auto rv = grid.column(&VolObservation::rv);
    const auto iv = grid.column(&VolObservation::iv);
    const std::vector<std::vector<double>> X{iv};

    const auto plain = stats::ols(rv, X, false, {"IV"});
    const auto with_const = stats::ols(rv, X, true, {"IV"});

    CointegrationReport rep;
    rep.n = grid.size();
    rep.slope_no_intercept = plain.coef[0];
    rep.slope_no_intercept_se = plain.se[0];
    rep.slope_no_intercept_p = plain.p_value[0];
    rep.intercept = with_const.coef[0];
    rep.intercept_p = with_const.p_value[0];
    rep.slope_with_intercept = with_const.coef[1];
    rep.aic_delta = with_const.aic - plain.aic;
    rep.bic_delta = with_const.bic - plain.bic;

    double yy = 0.0;
    for (double v : rv) yy += v * v;
    if (plain.ssr <= 1e-20 * yy) {
        rep.residual_t = TestResult::degenerate_result("t_test_zero_mean", "exact fit");
        rep.residual_bp = TestResult::degenerate_result("box_pierce", "exact fit");
        rep.residual_adf = TestResult::degenerate_result("adf", "exact fit");
        return rep;
    }
    auto guarded = [](const char* name, auto&& run) {
        try {
            return run();
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate) throw;
            return TestResult::degenerate_result(name, e.what());
        }
    };
    const auto& e = plain.residuals;
    rep.residual_t = guarded("t_test_zero_mean", [&] { return stats::t_test_zero_mean(e); });
    rep.residual_bp = guarded("box_pierce", [&] { return stats::box_pierce(e, opt.bp_lag); });
    rep.residual_adf = guarded("adf", [&] { return stats::adf(e, opt.adf_lag, opt.adf_deterministic); });
    return rep;
}

enum class Target { RV, IV };
enum class ShockVariable { horizon_return, last_day_return };
enum class SampleFilter { full, extreme_tails };
/// How the extreme-tails filter enters: restrict the sample to tail rows, or
/// keep every row and let a fall-tail dummy drive the interaction term.
enum class TailMode { restrict, dummies };

constexpr std::string_view to_string(Target t) noexcept { return t == Target::RV ? "RV" : "IV"; }

struct AsymmetrySpec {
    Target target = Target::RV;
    ShockVariable shock = ShockVariable::horizon_return;
    SampleFilter filter = SampleFilter::full;
    double lower_q = 0.10;
    double upper_q = 0.90;
    TailMode tail_mode = TailMode::restrict;
    HorizonSpec horizon = HorizonSpec::monthly();

    void validate() const {
        horizon.validate();
        if (filter == SampleFilter::extreme_tails) {
            if (shock != ShockVariable::horizon_return) {
                fail(ErrorKind::invalid_spec, "extreme_tails requires the horizon-return shock");
            }
            ShockClass::percentile(lower_q, upper_q).validate();
        }
    }
};

inline constexpr std::size_t kMinRegressionRows = 20;

inline const std::vector<std::string>& asymmetry_regressor_names() {
    static const std::vector<std::string> names{"shock(t-1)", "r(t)", "AR(t-1)", "Indicator(t-1)"};
    return names;
}

/// Estimates one asymmetry regression. Output coefficient order:
/// Intercept, shock(t-1), r(t), AR(t-1), Indicator(t-1).
inline RegressionResult asymmetry_regression(const VolGrid& grid, const AsymmetrySpec& spec) {
    spec.validate();
    if (grid.horizon.window_days != spec.horizon.window_days) {
        fail(ErrorKind::horizon_mismatch, "asymmetry_regression: grid window " +
                                              std::to_string(grid.horizon.window_days) + " vs spec window " +
                                              std::to_string(spec.horizon.window_days));
    }
    if (grid.size() < 2) fail(ErrorKind::insufficient_data, "asymmetry_regression: grid has fewer than 2 cells");

    std::vector<ShockLabel> tails;
    if (spec.filter == SampleFilter::extreme_tails) {
        tails = classify_shocks(grid, ShockClass::percentile(spec.lower_q, spec.upper_q));
    }
    const bool restrict_rows = spec.filter == SampleFilter::extreme_tails && spec.tail_mode == TailMode::restrict;

    auto target_of = [&](const VolObservation& c) { return spec.target == Target::RV ? c.rv : c.iv; };
    auto shock_of = [&](const VolObservation& c) {
        return spec.shock == ShockVariable::horizon_return ? c.r_prev : c.r_last_day;
    };

    std::vector<double> y;
    std::vector<std::vector<double>> cols(4);
    std::size_t negatives = 0;
    for (std::size_t t = 1; t < grid.size(); ++t) {
        if (restrict_rows && tails[t] == ShockLabel::none) continue;
        const auto& cell = grid.cells[t];
        const double s = shock_of(cell);
        double indicator = 0.0;
        if (spec.filter == SampleFilter::extreme_tails && spec.tail_mode == TailMode::dummies) {
            indicator = tails[t] == ShockLabel::fall ? 1.0 : 0.0;
        } else {
            indicator = s < 0.0 ? 1.0 : 0.0;
        }
        negatives += indicator > 0.0 ? 1 : 0;
        y.push_back(target_of(cell));
        cols[0].push_back(s);
        cols[1].push_back(cell.r_cur);
        cols[2].push_back(target_of(grid.cells[t - 1]));
        cols[3].push_back(indicator * s);
    }
    if (y.size() < kMinRegressionRows) {
        fail(ErrorKind::insufficient_data, "asymmetry_regression: " + std::to_string(y.size()) +
                                               " rows after filtering; need " + std::to_string(kMinRegressionRows));
    }
    if (negatives == 0) {
        fail(ErrorKind::rank_deficient,
             "asymmetry_regression: indicator is zero on every row (no negative shocks), column collinear");
    }
    if (negatives == y.size()) {
        fail(ErrorKind::rank_deficient,
             "asymmetry_regression: indicator is one on every row, interaction equals the shock column");
    }
    return stats::ols(y, cols, true, asymmetry_regressor_names());
}

enum class TableId { T2, T3, T4, T5 };

constexpr int table_number(TableId id) noexcept {
    switch (id) {
        case TableId::T2: return 2;
        case TableId::T3: return 3;
        case TableId::T4: return 4;
        case TableId::T5: return 5;
    }
    return 0;
}

struct TableOptions {
    double lower_q = 0.10;
    double upper_q = 0.90;
    TailMode tail_mode = TailMode::restrict;
};

/// The fixed configuration of each table for one target.
inline AsymmetrySpec table_spec(TableId id, Target target, const TableOptions& opt = {}) {
    AsymmetrySpec s;
    s.target = target;
    s.lower_q = opt.lower_q;
    s.upper_q = opt.upper_q;
    s.tail_mode = opt.tail_mode;
    switch (id) {
        case TableId::T2:
            s.shock = ShockVariable::horizon_return;
            s.filter = SampleFilter::extreme_tails;
            s.horizon = HorizonSpec::monthly();
            break;
        case TableId::T3:
            s.shock = ShockVariable::last_day_return;
            s.filter = SampleFilter::full;
            s.horizon = HorizonSpec::monthly();
            break;
        case TableId::T4:
            s.shock = ShockVariable::horizon_return;
            s.filter = SampleFilter::full;
            s.horizon = HorizonSpec::monthly();
            break;
        case TableId::T5:
            s.shock = ShockVariable::horizon_return;
            s.filter = SampleFilter::full;
            s.horizon = HorizonSpec::short_term();
            break;
    }
    return s;
}

/// Rejects a spec that does not match the table's design.
inline void check_table_spec(TableId id, const AsymmetrySpec& spec) {
    const auto expected = table_spec(id, spec.target);
    if (spec.filter != expected.filter) {
        fail(ErrorKind::invalid_spec, "table " + std::to_string(table_number(id)) +
                                          (expected.filter == SampleFilter::extreme_tails
                                               ? " requires the extreme_tails sample filter"
                                               : " requires the full sample"));
    }
    if (spec.shock != expected.shock) {
        fail(ErrorKind::invalid_spec, "table " + std::to_string(table_number(id)) + " uses a different shock variable");
    }
    if (spec.horizon.window_days != expected.horizon.window_days) {
        fail(ErrorKind::horizon_mismatch, "table " + std::to_string(table_number(id)) + " expects a " +
                                              std::to_string(expected.horizon.window_days) + "-day horizon");
    }
}

struct TableResult {
    TableId id = TableId::T4;
    RegressionResult rv;
    RegressionResult iv;
};

inline TableResult run_table(const VolGrid& grid, TableId id, const TableOptions& opt = {}) {
    const auto expected_window = id == TableId::T5 ? HorizonSpec::short_term().window_days
                                                   : HorizonSpec::monthly().window_days;
    if (grid.horizon.window_days != expected_window) {
        fail(ErrorKind::horizon_mismatch, "table " + std::to_string(table_number(id)) + " needs a " +
                                              std::to_string(expected_window) + "-day grid, got " +
                                              std::to_string(grid.horizon.window_days));
    }
    TableResult out;
    out.id = id;
    for (const Target target : {Target::RV, Target::IV}) {
        auto spec = table_spec(id, target, opt);
        spec.horizon = grid.horizon;
        check_table_spec(id, spec);
        (target == Target::RV ? out.rv : out.iv) = asymmetry_regression(grid, spec);
    }
    return out;
}

}  // namespace asymvol
