#pragma once

/**
 * @file pipeline.hpp
 * @brief In-process implementations of the pipeline, synth and calibrate
 * subcommands.
 *
 * Pipeline dispatch, per selected horizon and classification:
 *   monthly: Table 1 long column; percentile -> Tables 2, 3 and Figures 2, 3;
 *            sign -> Table 4 and Figures 4, 5; Figure 1 is the grid itself.
 *   short:   Table 1 short column; sign -> Table 5 and Figures 6, 7.
 *
 * Exit codes: 0 success, 2 config, 3 ingest, 4 analysis, 5 report.
 */

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asymvol/asymmetry.hpp"
#include "asymvol/config.hpp"
#include "asymvol/error.hpp"
#include "asymvol/eventstudy.hpp"
#include "asymvol/ingest.hpp"
#include "asymvol/report.hpp"
#include "asymvol/synth.hpp"
#include "asymvol/version.hpp"
#include "asymvol/volatility.hpp"

namespace asymvol {

enum class Stage { config, ingest, grid, battery, tables, figures, report };

constexpr std::string_view to_string(Stage s) noexcept {
    switch (s) {
        case Stage::config: return "config";
        case Stage::ingest: return "ingest";
        case Stage::grid: return "grid";
        case Stage::battery: return "battery";
        case Stage::tables: return "tables";
        case Stage::figures: return "figures";
        case Stage::report: return "report";
    }
    return "unknown";
}

constexpr int exit_code_for(Stage s) noexcept {
    switch (s) {
        case Stage::config: return 2;
        case Stage::ingest: return 3;
        case Stage::report: return 5;
        default: return 4;
    }
}

struct PipelineResult {
    int exit_code = 0;
    std::optional<Stage> failed_stage;
    std::string message;
    std::optional<RunManifest> manifest;

    [[nodiscard]] bool ok() const noexcept { return exit_code == 0; }
};

/// Everything the pipeline computes before it writes anything.
struct PipelineResults {
    std::optional<VolGrid> monthly;
    std::optional<VolGrid> short_term;
    Table1Input table1;
    std::vector<TableResult> tables;
    std::map<int, FigurePanels> figures;
};

namespace detail {

inline constexpr std::array<const char*, 4> kManagedOutputs{"tables", "figures", "grids", "run.log"};

/// Removes earlier pipeline artifacts so the manifest describes this run only.
inline void prepare_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create output directory " + dir.string() + ": " + ec.message());
    for (const char* name : kManagedOutputs) std::filesystem::remove_all(dir / name);
    std::filesystem::remove(dir / "manifest.json");
    const auto left = files_under(dir);
    if (!left.empty()) {
        fail(ErrorKind::invalid_argument, "output directory " + dir.string() + " holds unrelated file " +
                                              left.front() + "; use an empty or dedicated directory");
    }
}

class StageTracker {
public:
    Stage current = Stage::config;
    std::vector<std::string> log;

    template <typename... Parts>
    void note(const Parts&... parts) {
        std::ostringstream line;
        (line << ... << parts);
        log.push_back(line.str());
    }
};

inline PriceSeries ingest_one(const InputSpec& in, const RunConfig& cfg, const char* role,
                              std::map<std::string, std::string>& digests, StageTracker& st) {
    if (!std::filesystem::exists(in.path)) {
        fail(ErrorKind::io, std::string(role) + " file " + in.path.string() + " does not exist");
    }
    auto series = restrict_dates(load_csv(in.path, in.schema), cfg.start_date, cfg.end_date);
    if (series.empty()) fail(ErrorKind::insufficient_data, std::string(role) + " has no rows in the date range");
    digests[role] = sha256_file(in.path);
    st.note("input ", role, " rows=", series.size(), " first=", format_date(series.points.front().date),
            " last=", format_date(series.points.back().date), " sha256=", digests[role]);
    return series;
}

inline VolGrid grid_for(const PriceSeries& index, const PriceSeries& iv, const HorizonSpec& h, const RunConfig& cfg,
                        StageTracker& st) {
    const auto [idx, ivs] = align(index, iv);
    const auto returns = log_returns(idx);
    auto grid = build_grid(returns, ivs, h, cfg.annualization_days);
    st.note("grid ", h.label, " aligned_days=", idx.size(), " dropped_index=", index.size() - idx.size(),
            " dropped_iv=", iv.size() - ivs.size(), " cells=", grid.size());
    return grid;
}

inline void note_battery(const CointegrationReport& r, const std::string& label, StageTracker& st) {
    st.note("battery ", label, " n=", r.n, " slope=", format_number(r.slope_no_intercept),
            " t_p=", format_number(r.residual_t.p_value), " bp_p=", format_number(r.residual_bp.p_value),
            " adf_p=", format_number(r.residual_adf.p_value));
}

inline void note_panel(int id, const PanelOutcome& o, ShockLabel label, StageTracker& st) {
    if (o.ok()) {
        const auto& p = *o.panel;
        st.note("figure ", id, ' ', to_string(label), " events=", p.n_events[0],
                " dropped_boundary=", p.dropped_boundary, " dropped_zero_vol=", p.dropped_zero_vol,
                " dropped_overlap=", p.dropped_overlap);
    } else {
        st.note("figure ", id, ' ', to_string(label), " skipped: ", o.error);
    }
}

}  // namespace detail

/// Runs every analysis stage; `st.current` names the stage on failure.
inline PipelineResults compute(const RunConfig& cfg, detail::StageTracker& st,
                               std::map<std::string, std::string>& digests) {
    st.current = Stage::config;
    validate(cfg);

    st.current = Stage::ingest;
    const auto index = detail::ingest_one(*cfg.index, cfg, "index", digests, st);
    std::optional<PriceSeries> iv_m;
    std::optional<PriceSeries> iv_s;
    if (cfg.wants_monthly()) iv_m = detail::ingest_one(*cfg.iv_monthly, cfg, "iv_monthly", digests, st);
    if (cfg.wants_short()) iv_s = detail::ingest_one(*cfg.iv_short, cfg, "iv_short", digests, st);

    PipelineResults res;
    st.current = Stage::grid;
    if (iv_m) res.monthly = detail::grid_for(index, *iv_m, HorizonSpec::monthly(), cfg, st);
    if (iv_s) res.short_term = detail::grid_for(index, *iv_s, HorizonSpec::short_term(), cfg, st);

    st.current = Stage::battery;
    const BatteryOptions bopt{cfg.bp_lag, cfg.adf_lag, stats::AdfDeterministic::none};
    if (res.monthly) {
        res.table1.long_term = cointegration_battery(*res.monthly, bopt);
        detail::note_battery(*res.table1.long_term, "monthly", st);
    }
    if (res.short_term) {
        res.table1.short_term = cointegration_battery(*res.short_term, bopt);
        detail::note_battery(*res.table1.short_term, "short", st);
    }

    st.current = Stage::tables;
    const TableOptions topt{cfg.lower_q, cfg.upper_q, cfg.tail_mode};
    auto table = [&](const VolGrid& g, TableId id) {
        res.tables.push_back(run_table(g, id, topt));
        const auto& t = res.tables.back();
        st.note("table ", table_number(id), " rows=", t.rv.n, " rv_beta4=", format_number(t.rv.coef.back()),
                " rv_p=", format_number(t.rv.p_value.back()), " iv_beta4=", format_number(t.iv.coef.back()),
                " iv_p=", format_number(t.iv.p_value.back()));
    };
    if (res.monthly && cfg.wants_percentile()) {
        table(*res.monthly, TableId::T2);
        table(*res.monthly, TableId::T3);
    }
    if (res.monthly && cfg.wants_sign()) table(*res.monthly, TableId::T4);
    if (res.short_term && cfg.wants_sign()) table(*res.short_term, TableId::T5);

    st.current = Stage::figures;
    const EventOptions eopt{cfg.cumulative, kMinEvents};
    auto figures = [&](const VolGrid& g, const ShockClass& cls) {
        for (auto& [id, panels] : run_figures(g, cls, eopt)) {
            detail::note_panel(id, panels.fall, ShockLabel::fall, st);
            detail::note_panel(id, panels.jump, ShockLabel::jump, st);
            res.figures[id] = std::move(panels);
        }
    };
    if (res.monthly && cfg.wants_percentile()) figures(*res.monthly, ShockClass::percentile(cfg.lower_q, cfg.upper_q));
    if (res.monthly && cfg.wants_sign()) figures(*res.monthly, ShockClass::sign());
    if (res.short_term && cfg.wants_sign()) figures(*res.short_term, ShockClass::sign());
    return res;
}

inline RunManifest emit_results(const RunConfig& cfg, const PipelineResults& res,
                                const std::map<std::string, std::string>& digests, detail::StageTracker& st) {
    detail::prepare_output_dir(cfg.output_dir);
    OutputWriter w(cfg.output_dir);
    emit_table1(res.table1, w);
    for (const auto& t : res.tables) emit_table(t, w);
    if (res.monthly) {
        const auto csv = grid_csv(*res.monthly);
        w.write("figures/fig1.csv", csv);
        w.write("grids/monthly.csv", csv);
    }
    if (res.short_term) w.write("grids/short.csv", grid_csv(*res.short_term));
    for (const auto& [id, panels] : res.figures) {
        if (panels.fall.ok()) emit_figure(*panels.fall.panel, id, w);
        if (panels.jump.ok()) emit_figure(*panels.jump.panel, id, w);
    }
    std::string log;
    for (const auto& line : st.log) log += line + "\n";
    w.write("run.log", log);
    return write_manifest(w, config_hash(cfg), digests, kVersion);
}

/// The `pipeline` subcommand. Diagnostics go to `diag`.
inline PipelineResult run_pipeline(const RunConfig& cfg, std::ostream& diag) {
    detail::StageTracker st;
    st.note("asymvol ", kVersion);
    std::map<std::string, std::string> digests;
    PipelineResult out;
    try {
        st.current = Stage::config;
        st.note("config_hash ", config_hash(cfg));
        const auto res = compute(cfg, st, digests);
        st.current = Stage::report;
        out.manifest = emit_results(cfg, res, digests, st);
    } catch (const std::exception& e) {
        out.exit_code = exit_code_for(st.current);
        out.failed_stage = st.current;
        out.message = e.what();
        diag << "asymvol pipeline: " << to_string(st.current) << " stage failed: " << e.what() << '\n';
        return out;
    }
    diag << "asymvol pipeline: wrote " << out.manifest->outputs.size() << " files to " << cfg.output_dir.string()
         << '\n';
    return out;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

/// Writes the spec's series to `out_dir`; returns the written file names.
/// Return processes give index.csv (date,close), returns.csv (date,value) and
/// one <name>.csv per IV series; level processes give series.csv.
inline std::vector<std::string> run_synth(const SynthFileSpec& spec, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create " + out_dir.string() + ": " + ec.message());
    std::vector<std::string> written;
    const auto& m = spec.market;
    if (!synth::is_return_process(m.returns.process)) {
        if (!m.iv.empty()) fail(ErrorKind::invalid_spec, "synth: IV series need a return process");
        write_csv(synth::generate_returns(m.returns, m.start, "series"), out_dir / "series.csv");
        written.emplace_back("series.csv");
        return written;
    }
    const auto market = synth::generate_market(m);
    write_csv(market.index, out_dir / "index.csv");
    write_csv(market.returns, out_dir / "returns.csv");
    written.emplace_back("index.csv");
    written.emplace_back("returns.csv");
    for (const auto& iv : market.iv) {
        write_csv(iv, out_dir / (iv.name + ".csv"));
        written.push_back(iv.name + ".csv");
    }
    return written;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

enum class Suite { adf, box_pierce, power };

inline Suite suite_from(const std::string& name) {
    if (name == "adf") return Suite::adf;
    if (name == "box_pierce") return Suite::box_pierce;
    if (name == "power") return Suite::power;
    fail(ErrorKind::invalid_argument, "unknown calibration suite '" + name + "' (adf|box_pierce|power)");
}

constexpr std::string_view to_string(Suite s) noexcept {
    switch (s) {
        case Suite::adf: return "adf";
        case Suite::box_pierce: return "box_pierce";
        case Suite::power: return "power";
    }
    return "unknown";
}

struct CalibrationCheck {
    std::string name;
    std::size_t trials = 0;
    std::size_t hits = 0;
    std::size_t failed_trials = 0;  ///< trials whose data could not be generated or fitted
    double band_lo = 0.0;
    double band_hi = 1.0;

    [[nodiscard]] std::size_t usable() const noexcept { return trials - failed_trials; }
    [[nodiscard]] double rate() const noexcept {
        return usable() == 0 ? std::nan("") : static_cast<double>(hits) / static_cast<double>(usable());
    }
    [[nodiscard]] double standard_error() const noexcept {
        const double p = rate();
        return std::sqrt(p * (1.0 - p) / static_cast<double>(usable()));
    }
    [[nodiscard]] bool pass() const noexcept {
        const double p = rate();
        return std::isfinite(p) && p >= band_lo && p <= band_hi;
    }
};

struct CalibrationReport {
    Suite suite = Suite::adf;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<CalibrationCheck> checks;

    [[nodiscard]] bool pass() const noexcept {
        for (const auto& c : checks) {
            if (!c.pass()) return false;
        }
        return !checks.empty();
    }
};

inline nlohmann::json to_json(const CalibrationReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"trials", c.trials},
                          {"failed_trials", c.failed_trials},
                          {"hits", c.hits},
                          {"rate", detail::number_or_null(c.rate())},
                          {"standard_error", detail::number_or_null(c.standard_error())},
                          {"band", {c.band_lo, c.band_hi}},
                          {"pass", c.pass()}});
    }
    return {{"schema_version", kSchemaVersion},
            {"suite", std::string(to_string(r.suite))},
            {"trials", r.trials},
            {"seed", r.seed},
            {"pass", r.pass()},
            {"checks", checks}};
}

inline constexpr std::size_t kMinCalibrationTrials = 100;
inline constexpr std::size_t kCalibrationGridLength = 280;
inline constexpr double kCalibrationLevel = 0.05;

struct PowerSettings {
    synth::GjrGarch asymmetric{};
    std::size_t n = 5000;
    double iv_slope = 0.86;
    double iv_noise_sigma = 0.25;
};

namespace detail {

/// Runs `trial(seed)` for seed = base .. base+trials-1; a trial returns
/// true/false for reject or nullopt when its data is unusable.
template <typename Trial>
CalibrationCheck run_check(std::string name, std::size_t trials, std::uint64_t base, double lo, double hi,
                           Trial&& trial) {
    CalibrationCheck c{std::move(name), trials, 0, 0, lo, hi};
    for (std::size_t i = 0; i < trials; ++i) {
        const std::optional<bool> r = trial(base + i);
        if (!r) {
            ++c.failed_trials;
        } else if (*r) {
            ++c.hits;
        }
    }
    return c;
}

/// A cointegrated grid of `cells` anchors: RV from iid returns, IV by inversion.
inline VolGrid synthetic_cointegrated_grid(std::uint64_t seed, std::size_t cells, const synth::Process& noise,
                                           double slope = 0.86) {
    const auto h = HorizonSpec::monthly();
    const std::size_t W = h.window_days;
    synth::GeneratorSpec rspec{synth::GaussianIid{0.01}, (cells + 1) * W, seed, 0};
    const auto r = synth::generate_series(rspec);
    std::vector<double> rv(cells);
    for (std::size_t i = 0; i < cells; ++i) rv[i] = realized_vol(r, (i + 1) * W, h);
    const auto iv = synth::generate_iv_for(rv, slope, synth::GeneratorSpec{noise, cells, seed, 1});
    VolGrid g{h, kDefaultAnnualizationDays, {}};
    for (std::size_t i = 0; i < cells; ++i) {
        VolObservation c;
        c.day_index = (i + 1) * W;
        c.iv = iv[i];
        c.rv = rv[i];
        g.cells.push_back(c);
    }
    return g;
}

/// beta4 of the RV-target Table-4 regression on one GJR market; nullopt when
/// the market or regression cannot be formed.
inline std::optional<bool> gjr_beta4_rejects(std::uint64_t seed, const synth::GjrGarch& process,
                                             const PowerSettings& s) {
    try {
        synth::MarketSpec m;
        m.returns = synth::GeneratorSpec{process, s.n, seed, 0};
        synth::IvSpec iv;
        iv.slope = s.iv_slope;
        iv.noise = synth::GeneratorSpec{synth::GaussianIid{s.iv_noise_sigma}, 0, seed, 1};
        m.iv = {iv};
        const auto market = synth::generate_market(m);
        const auto grid = build_grid(log_returns(market.index), market.iv[0], HorizonSpec::monthly());
        const auto t4 = run_table(grid, TableId::T4);
        const auto i = t4.rv.index_of("Indicator(t-1)").value();
        return t4.rv.coef[i] < 0.0 && t4.rv.p_value[i] < kCalibrationLevel;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace detail

/**
 * Monte Carlo size and power checks. Each check uses seeds base..base+trials-1
 * with base = seed + check_index * 1e9, so checks are independent and any
 * trial reproduces from its seed alone.
 */
inline CalibrationReport calibrate(Suite suite, std::size_t trials, std::uint64_t seed,
                                   const PowerSettings& power = {}) {
    if (trials < kMinCalibrationTrials) {
        fail(ErrorKind::invalid_argument, "calibrate: trials must be at least " + std::to_string(kMinCalibrationTrials));
    }
    CalibrationReport rep{suite, trials, seed, {}};
    constexpr std::uint64_t kCheckStride = 1'000'000'000ULL;
    const std::size_t n = kCalibrationGridLength + 1;
    auto base = [&](std::uint64_t k) { return seed + k * kCheckStride; };

    switch (suite) {
        case Suite::adf: {
            auto adf_rejects = [](std::uint64_t s, const synth::Process& p, std::size_t len, std::size_t lag,
                                  stats::AdfDeterministic det) -> std::optional<bool> {
                const auto x = synth::generate_series({p, len, s, 0});
                return stats::adf(x, lag, det).p_value < kCalibrationLevel;
            };
            rep.checks.push_back(detail::run_check("adf_null_random_walk_intercept_lag0", trials, base(0), 0.035, 0.065,
                                                   [&](std::uint64_t s) {
                                                       return adf_rejects(s, synth::RandomWalk{1.0}, n, 0,
                                                                          stats::AdfDeterministic::intercept);
                                                   }));
            rep.checks.push_back(detail::run_check("adf_null_random_walk_none_lag6", trials, base(1), 0.035, 0.065,
                                                   [&](std::uint64_t s) {
                                                       return adf_rejects(s, synth::RandomWalk{1.0}, n, 6,
                                                                          stats::AdfDeterministic::none);
                                                   }));
            rep.checks.push_back(detail::run_check("adf_power_iid_intercept_lag0_n500", trials, base(2), 0.95, 1.0,
                                                   [&](std::uint64_t s) {
                                                       return adf_rejects(s, synth::GaussianIid{1.0}, 500, 0,
                                                                          stats::AdfDeterministic::intercept);
                                                   }));
            break;
        }
        case Suite::box_pierce: {
            rep.checks.push_back(detail::run_check(
                "bp_null_iid", trials, base(0), 0.035, 0.065, [&](std::uint64_t s) -> std::optional<bool> {
                    const auto x = synth::generate_series({synth::GaussianIid{1.0}, kCalibrationGridLength, s, 0});
                    return stats::box_pierce(x, 1).p_value < kCalibrationLevel;
                }));
            auto residual_bp = [](std::uint64_t s, const synth::Process& noise) -> std::optional<bool> {
                try {
                    const auto g = detail::synthetic_cointegrated_grid(s, kCalibrationGridLength, noise);
                    return cointegration_battery(g).residual_bp.p_value < kCalibrationLevel;
                } catch (const Error&) {
                    return std::nullopt;
                }
            };
            rep.checks.push_back(detail::run_check("bp_null_cointegration_white_noise", trials, base(1), 0.035, 0.065,
                                                   [&](std::uint64_t s) {
                                                       return residual_bp(s, synth::GaussianIid{1.0});
                                                   }));
            rep.checks.push_back(detail::run_check("bp_power_cointegration_ar1_phi0.5", trials, base(2), 0.90, 1.0,
                                                   [&](std::uint64_t s) {
                                                       return residual_bp(s, synth::Ar1{0.5, 1.0});
                                                   }));
            break;
        }
        case Suite::power: {
            auto symmetric = power.asymmetric;
            symmetric.gamma = 0.0;
            rep.checks.push_back(detail::run_check(
                "gjr_beta4_power_gamma" + format_number(power.asymmetric.gamma), trials, base(0), 0.80, 1.0,
                [&](std::uint64_t s) { return detail::gjr_beta4_rejects(s, power.asymmetric, power); }));
            rep.checks.push_back(detail::run_check("gjr_beta4_size_gamma0", trials, base(1), 0.0, 0.10,
                                                   [&](std::uint64_t s) {
                                                       return detail::gjr_beta4_rejects(s, symmetric, power);
                                                   }));
            break;
        }
    }
    return rep;
}

}  // namespace asymvol
