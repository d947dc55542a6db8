#pragma once

/**
 * @file eventstudy.hpp
 * @brief Volatility event panels around classified shocks.
 *
 * For an event anchored at grid cell t and a volatility series V, the
 * cumulative return at step s in {-1, 0, 1, 2} is V(t+s)/V(t-1) - 1
 * (or ln(V(t+s)/V(t-1)) in log mode). IV(t+s) is the index close at anchor
 * t+s; RV(t+s) is that cell's forward-window realized volatility.
 */

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asymvol/error.hpp"
#include "asymvol/stats/hypothesis.hpp"
#include "asymvol/volatility.hpp"

namespace asymvol {

inline constexpr std::array<int, 4> kEventSteps{-1, 0, 1, 2};
inline constexpr std::size_t kMinEvents = 5;

enum class CumulativeKind { arithmetic, log };

struct EventOptions {
    CumulativeKind kind = CumulativeKind::arithmetic;
    std::size_t min_events = kMinEvents;
};

/// Per-event cumulative paths, kept separately so samples can be pooled.
struct EventSet {
    ShockLabel label = ShockLabel::fall;
    std::vector<std::array<double, 4>> cum_iv;
    std::vector<std::array<double, 4>> cum_rv;
    std::vector<std::size_t> anchors;  ///< grid cell index of each event
    std::size_t dropped_boundary = 0;
    std::size_t dropped_zero_vol = 0;
    std::size_t dropped_overlap = 0;

    [[nodiscard]] std::size_t size() const noexcept { return cum_iv.size(); }

    void append(const EventSet& other) {
        cum_iv.insert(cum_iv.end(), other.cum_iv.begin(), other.cum_iv.end());
        cum_rv.insert(cum_rv.end(), other.cum_rv.begin(), other.cum_rv.end());
        anchors.insert(anchors.end(), other.anchors.begin(), other.anchors.end());
        dropped_boundary += other.dropped_boundary;
        dropped_zero_vol += other.dropped_zero_vol;
        dropped_overlap += other.dropped_overlap;
    }
};

struct EventPanel {
    ShockLabel label = ShockLabel::fall;
    std::array<int, 4> steps = kEventSteps;
    std::array<double, 4> mean_cum_iv{};
    std::array<double, 4> mean_cum_rv{};
    std::array<double, 4> diff{};
    std::array<double, 4> diff_p{};  ///< NaN where the per-event diffs are constant or single
    std::array<std::size_t, 4> n_events{};
    std::size_t dropped_boundary = 0;
    std::size_t dropped_zero_vol = 0;
    std::size_t dropped_overlap = 0;
};

/**
 * Collects events of label `which`. Events lacking cells t-1..t+2 are
 * dropped (boundary), as are events with a zero volatility at t-1 and events
 * whose window intersects the previous accepted event's window, so no grid
 * cell serves two events of the same label.
 */
inline EventSet collect_events(const VolGrid& grid, std::span<const ShockLabel> labels, ShockLabel which,
                               CumulativeKind kind = CumulativeKind::arithmetic) {
    if (labels.size() != grid.size()) fail(ErrorKind::invalid_argument, "event labels do not match grid size");
    EventSet set;
    set.label = which;
    std::optional<std::size_t> last_window_end;
    auto cumulative = [kind](double v, double base) {
        return kind == CumulativeKind::arithmetic ? v / base - 1.0 : std::log(v / base);
    };
    for (std::size_t t = 0; t < grid.size(); ++t) {
        if (labels[t] != which) continue;
        if (t < 1 || t + 2 >= grid.size()) {
            ++set.dropped_boundary;
            continue;
        }
        const auto& base = grid.cells[t - 1];
        if (!(base.iv > 0.0) || !(base.rv > 0.0)) {
            ++set.dropped_zero_vol;
            continue;
        }
        if (last_window_end && t - 1 <= *last_window_end) {
            ++set.dropped_overlap;
            continue;
        }
        std::array<double, 4> iv{};
        std::array<double, 4> rv{};
        for (std::size_t j = 0; j < kEventSteps.size(); ++j) {
            const auto& cell = grid.cells[t - 1 + static_cast<std::size_t>(kEventSteps[j] + 1)];
            iv[j] = cumulative(cell.iv, base.iv);
            rv[j] = cumulative(cell.rv, base.rv);
        }
        iv[0] = 0.0;
        rv[0] = 0.0;
        set.cum_iv.push_back(iv);
        set.cum_rv.push_back(rv);
        set.anchors.push_back(t);
        last_window_end = t + 2;
    }
    return set;
}

inline EventPanel summarize(const EventSet& set, std::size_t min_events = kMinEvents) {
    if (set.size() < min_events) {
        fail(ErrorKind::insufficient_data, std::string("event panel '") + std::string(to_string(set.label)) +
                                               "': " + std::to_string(set.size()) + " usable events; need " +
                                               std::to_string(min_events));
    }
    EventPanel p;
    p.label = set.label;
    p.dropped_boundary = set.dropped_boundary;
    p.dropped_zero_vol = set.dropped_zero_vol;
    p.dropped_overlap = set.dropped_overlap;
    const double n = static_cast<double>(set.size());
    for (std::size_t j = 0; j < kEventSteps.size(); ++j) {
        std::vector<double> diffs;
        diffs.reserve(set.size());
        double siv = 0.0;
        double srv = 0.0;
        for (std::size_t e = 0; e < set.size(); ++e) {
            siv += set.cum_iv[e][j];
            srv += set.cum_rv[e][j];
            diffs.push_back(set.cum_iv[e][j] - set.cum_rv[e][j]);
        }
        p.mean_cum_iv[j] = siv / n;
        p.mean_cum_rv[j] = srv / n;
        p.diff[j] = p.mean_cum_iv[j] - p.mean_cum_rv[j];
        p.n_events[j] = set.size();
        try {
            p.diff_p[j] = stats::t_test_zero_mean(diffs).p_value;
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::degenerate && err.kind() != ErrorKind::too_short) throw;
            p.diff_p[j] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return p;
}

inline EventPanel event_panel(const VolGrid& grid, std::span<const ShockLabel> labels, ShockLabel which,
                              const EventOptions& opt = {}) {
    if (which == ShockLabel::none) fail(ErrorKind::invalid_argument, "event_panel: label must be fall or jump");
    return summarize(collect_events(grid, labels, which, opt.kind), opt.min_events);
}

/// A panel or the reason it could not be produced.
struct PanelOutcome {
    std::optional<EventPanel> panel;
    std::string error;

    [[nodiscard]] bool ok() const noexcept { return panel.has_value(); }
};

struct FigurePanels {
    int figure = 0;
    PanelOutcome fall;
    PanelOutcome jump;
};

/// Figure ids served by a (classification, horizon) pair: percentile tails
/// on the monthly grid give 2/3, sign classification gives 4/5 monthly and
/// 6/7 short-term. Figures of a pair share the same panels: the first plots
/// cumulative paths, the second the IV-RV difference and its p-values.
inline std::vector<int> figure_ids(const ShockClass& cls, const HorizonSpec& horizon) {
    const bool monthly = horizon.window_days == HorizonSpec::monthly().window_days;
    const bool short_term = horizon.window_days == HorizonSpec::short_term().window_days;
    if (cls.mode == ShockClass::Mode::percentile_tails && monthly) return {2, 3};
    if (cls.mode == ShockClass::Mode::sign && monthly) return {4, 5};
    if (cls.mode == ShockClass::Mode::sign && short_term) return {6, 7};
    fail(ErrorKind::horizon_mismatch, "no figure uses this classification on a " +
                                          std::to_string(horizon.window_days) + "-day grid");
}

inline std::map<int, FigurePanels> run_figures(const VolGrid& grid, const ShockClass& cls,
                                               const EventOptions& opt = {}) {
    const auto ids = figure_ids(cls, grid.horizon);
    const auto labels = classify_shocks(grid, cls);
    auto attempt = [&](ShockLabel which) {
        PanelOutcome o;
        try {
            o.panel = event_panel(grid, labels, which, opt);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::insufficient_data) throw;
            o.error = e.what();
        }
        return o;
    };
    const auto fall = attempt(ShockLabel::fall);
    const auto jump = attempt(ShockLabel::jump);
    std::map<int, FigurePanels> out;
    for (int id : ids) out[id] = FigurePanels{id, fall, jump};
    return out;
}

}  // namespace asymvol
