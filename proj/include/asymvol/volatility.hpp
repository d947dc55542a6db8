#pragma once

/**
 * @file volatility.hpp
 * @brief Realized volatility, the non-overlapping IV/RV grid and shock labels.
 *
 * Realized volatility over a W-day window, in annualized percent:
 *   RV = 100 * sqrt(A * sum_k (r_k - rbar)^2 / W)
 * with A the annualization day count (365 by default, the VIX calendar-day
 * convention) and the population divisor W.
 *
 * Grid indexing is in trading days of the aligned price series: day d
 * carries the close of day d and (for d >= 1) the log return from d-1 to d.
 * Anchors sit at d = W, 2W, ... while a full forward window d+1..d+W exists.
 */

#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "asymvol/error.hpp"
#include "asymvol/ingest.hpp"
#include "asymvol/stats/descriptive.hpp"

namespace asymvol {

struct HorizonSpec {
    std::size_t window_days = 22;
    std::string label = "monthly";

    static HorizonSpec monthly() { return {22, "monthly"}; }
    static HorizonSpec short_term() { return {6, "short"}; }

    void validate() const {
        if (window_days < 2) fail(ErrorKind::invalid_spec, "horizon window must be at least 2 days");
    }

    friend bool operator==(const HorizonSpec&, const HorizonSpec&) = default;
};

inline constexpr std::size_t kDefaultAnnualizationDays = 365;

/// Realized volatility of returns[start .. start+W-1].
inline double realized_vol(std::span<const double> returns, std::size_t start_index, const HorizonSpec& spec,
                           std::size_t annualization_days = kDefaultAnnualizationDays) {
    spec.validate();
    if (annualization_days == 0) fail(ErrorKind::invalid_argument, "annualization_days must be positive");
    const std::size_t W = spec.window_days;
    if (start_index > returns.size() || returns.size() - start_index < W) {
        fail(ErrorKind::out_of_range, "realized_vol: window [" + std::to_string(start_index) + ", " +
                                          std::to_string(start_index + W) + ") exceeds " +
                                          std::to_string(returns.size()) + " returns");
    }
    const auto window = returns.subspan(start_index, W);
    // Deviations from the first return are exact for a constant window.
    const double shift = window.front();
    double sum = 0.0;
    for (double r : window) sum += r - shift;
    const double m = sum / static_cast<double>(W);
    double ss = 0.0;
    for (double r : window) ss += (r - shift - m) * (r - shift - m);
    return 100.0 * std::sqrt(static_cast<double>(annualization_days) * ss / static_cast<double>(W));
}

inline double realized_vol(const ReturnSeries& returns, std::size_t start_index, const HorizonSpec& spec,
                           std::size_t annualization_days = kDefaultAnnualizationDays) {
    const auto v = returns.values();
    return realized_vol(v, start_index, spec, annualization_days);
}

/// One non-overlapping grid cell anchored at trading day t.
struct VolObservation {
    Date t_date;
    std::size_t day_index = 0;  ///< t in the aligned day numbering
    double iv = 0.0;            ///< implied-volatility close on day t
    double rv = 0.0;            ///< realized volatility over days t+1..t+W
    double r_prev = 0.0;        ///< log return over days t-W+1..t
    double r_cur = 0.0;         ///< log return over days t+1..t+W
    double r_last_day = 0.0;    ///< daily log return on day t

    friend bool operator==(const VolObservation&, const VolObservation&) = default;
};

struct VolGrid {
    HorizonSpec horizon;
    std::size_t annualization_days = kDefaultAnnualizationDays;
    std::vector<VolObservation> cells;

    [[nodiscard]] std::size_t size() const noexcept { return cells.size(); }
    [[nodiscard]] bool empty() const noexcept { return cells.empty(); }

    [[nodiscard]] std::vector<double> column(double VolObservation::*field) const {
        std::vector<double> out;
        out.reserve(cells.size());
        for (const auto& c : cells) out.push_back(c.*field);
        return out;
    }
};

/// Number of anchors build_grid produces from `trading_days` aligned days.
constexpr std::size_t grid_size(std::size_t trading_days, std::size_t window_days) noexcept {
    if (window_days == 0 || trading_days == 0) return 0;
    std::size_t count = 0;
    for (std::size_t t = window_days; t + window_days <= trading_days - 1; t += window_days) ++count;
    return count;
}

/**
 * Builds the grid from daily index returns and the implied-volatility
 * series. Every anchor's date must have an IV close; the IV series is looked
 * up by date, so it may carry the extra first day the returns lack.
 */
inline VolGrid build_grid(const ReturnSeries& index_returns, const PriceSeries& iv_series, const HorizonSpec& spec,
                          std::size_t annualization_days = kDefaultAnnualizationDays) {
    spec.validate();
    const std::size_t W = spec.window_days;
    const std::size_t days = index_returns.size() + 1;
    if (index_returns.size() < 2 * W) {
        fail(ErrorKind::insufficient_data, "build_grid: " + std::to_string(days) + " trading days; need at least " +
                                               std::to_string(2 * W + 1) + " for one " + spec.label + " cell");
    }
    const auto r = index_returns.values();
    // return of day d lives at r[d - 1]
    auto sum_days = [&](std::size_t first_day, std::size_t last_day) {
        double s = 0.0;
        for (std::size_t d = first_day; d <= last_day; ++d) s += r[d - 1];
        return s;
    };

    VolGrid grid{spec, annualization_days, {}};
    for (std::size_t t = W; t + W <= days - 1; t += W) {
        const Date date = index_returns.points[t - 1].date;
        const auto iv = iv_series.at(date);
        if (!iv) {
            fail(ErrorKind::invalid_argument, "build_grid: implied-volatility series '" + iv_series.name +
                                                  "' has no close on anchor date " + format_date(date) +
                                                  " (series not aligned)");
        }
        VolObservation cell;
        cell.t_date = date;
        cell.day_index = t;
        cell.iv = *iv;
        cell.rv = realized_vol(r, t, spec, annualization_days);
        cell.r_prev = sum_days(t - W + 1, t);
        cell.r_cur = sum_days(t + 1, t + W);
        cell.r_last_day = r[t - 1];
        grid.cells.push_back(cell);
    }
    return grid;
}

/// Percentile tails or the sign split of the indicator function.
struct ShockClass {
    enum class Mode { percentile_tails, sign };
    Mode mode = Mode::percentile_tails;
    double lower_q = 0.10;
    double upper_q = 0.90;

    static ShockClass percentile(double lower = 0.10, double upper = 0.90) {
        return {Mode::percentile_tails, lower, upper};
    }
    static ShockClass sign() { return {Mode::sign, 0.10, 0.90}; }

    void validate() const {
        if (mode == Mode::percentile_tails && !(0.0 < lower_q && lower_q < upper_q && upper_q < 1.0)) {
            fail(ErrorKind::invalid_spec, "shock quantiles must satisfy 0 < lower < upper < 1");
        }
    }

    friend bool operator==(const ShockClass&, const ShockClass&) = default;
};

enum class ShockLabel { none, fall, jump };

constexpr std::string_view to_string(ShockLabel l) noexcept {
    switch (l) {
        case ShockLabel::fall: return "fall";
        case ShockLabel::jump: return "jump";
        case ShockLabel::none: return "none";
    }
    return "none";
}

/// Labels arbitrary shock values. Percentile thresholds come from the full
/// sample; a value equal to a threshold is not in the tail.
inline std::vector<ShockLabel> classify_values(std::span<const double> shocks, const ShockClass& cls) {
    cls.validate();
    std::vector<ShockLabel> out(shocks.size(), ShockLabel::none);
    if (cls.mode == ShockClass::Mode::sign) {
        for (std::size_t i = 0; i < shocks.size(); ++i) {
            out[i] = shocks[i] < 0.0 ? ShockLabel::fall : ShockLabel::jump;
        }
        return out;
    }
    const double lo = stats::quantile(shocks, cls.lower_q);
    const double hi = stats::quantile(shocks, cls.upper_q);
    for (std::size_t i = 0; i < shocks.size(); ++i) {
        if (shocks[i] < lo) {
            out[i] = ShockLabel::fall;
        } else if (shocks[i] > hi) {
            out[i] = ShockLabel::jump;
        }
    }
    return out;
}

/// Labels grid cells by r_prev.
inline std::vector<ShockLabel> classify_shocks(const VolGrid& grid, const ShockClass& cls) {
    if (grid.empty()) fail(ErrorKind::insufficient_data, "classify_shocks: empty grid");
    const auto r_prev = grid.column(&VolObservation::r_prev);
    return classify_values(r_prev, cls);
}

/// Grid export: `t_date,iv,rv,r_prev,r_cur,r_last_day,label`. Labels may be
/// empty, in which case the column holds "none".
inline void write_grid_csv(const VolGrid& grid, std::span<const ShockLabel> labels, std::ostream& out) {
    if (!labels.empty() && labels.size() != grid.size()) {
        fail(ErrorKind::invalid_argument, "write_grid_csv: label count differs from grid size");
    }
    out << "t_date,iv,rv,r_prev,r_cur,r_last_day,label\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& c = grid.cells[i];
        out << format_date(c.t_date) << ',' << detail::shortest(c.iv) << ',' << detail::shortest(c.rv) << ','
            << detail::shortest(c.r_prev) << ',' << detail::shortest(c.r_cur) << ','
            << detail::shortest(c.r_last_day) << ',' << to_string(labels.empty() ? ShockLabel::none : labels[i])
            << '\n';
    }
}

}  // namespace asymvol
