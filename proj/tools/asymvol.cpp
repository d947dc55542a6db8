#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "asymvol/asymvol.hpp"

namespace {

struct PipelineFlags {
    std::string config;
    std::string index, iv_monthly, iv_short;
    std::string from, to;
    std::string horizons, classification, tail_mode, cumulative;
    std::optional<std::size_t> annualization_days, adf_lag, bp_lag;
    std::optional<double> lower_q, upper_q;
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    bool print_config = false;
};

void set_path(std::optional<asymvol::InputSpec>& slot, const std::string& path) {
    if (path.empty()) return;
    if (!slot) slot = asymvol::InputSpec{};
    slot->path = std::filesystem::absolute(path).lexically_normal();
}

asymvol::RunConfig resolve(const PipelineFlags& f) {
    using nlohmann::json;
    auto cfg = f.config.empty() ? asymvol::default_config() : asymvol::load_config(f.config);
    set_path(cfg.index, f.index);
    set_path(cfg.iv_monthly, f.iv_monthly);
    set_path(cfg.iv_short, f.iv_short);
    json overlay = json::object();
    if (!f.from.empty()) overlay["start_date"] = f.from;
    if (!f.to.empty()) overlay["end_date"] = f.to;
    if (!f.horizons.empty()) overlay["horizons"] = f.horizons;
    if (!f.classification.empty()) overlay["classification"] = f.classification;
    if (!f.tail_mode.empty()) overlay["tail_mode"] = f.tail_mode;
    if (!f.cumulative.empty()) overlay["cumulative"] = f.cumulative;
    if (f.annualization_days) overlay["annualization_days"] = *f.annualization_days;
    if (f.adf_lag) overlay["adf_lag"] = *f.adf_lag;
    if (f.bp_lag) overlay["bp_lag"] = *f.bp_lag;
    if (f.lower_q) overlay["lower_q"] = *f.lower_q;
    if (f.upper_q) overlay["upper_q"] = *f.upper_q;
    if (f.seed) overlay["seed"] = *f.seed;
    if (!f.output_dir.empty()) overlay["output_dir"] = f.output_dir;
    return asymvol::config_from_json(overlay, std::move(cfg), std::filesystem::current_path());
}

int cmd_pipeline(const PipelineFlags& f) {
    asymvol::RunConfig cfg;
    try {
        cfg = resolve(f);
    } catch (const std::exception& e) {
        std::cerr << "asymvol pipeline: config stage failed: " << e.what() << '\n';
        return asymvol::exit_code_for(asymvol::Stage::config);
    }
    if (f.print_config) {
        std::cout << asymvol::to_json(cfg).dump(2) << '\n';
        return 0;
    }
    return asymvol::run_pipeline(cfg, std::cerr).exit_code;
}

int cmd_synth(const std::string& spec_path, const std::string& output_dir) {
    try {
        const auto spec = asymvol::load_synth_spec(spec_path);
        std::filesystem::path out = output_dir.empty() ? spec.output_dir.value_or(asymvol::default_output_dir())
                                                       : std::filesystem::path(output_dir);
        for (const auto& name : asymvol::run_synth(spec, out)) std::cout << (out / name).string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "asymvol synth: " << e.what() << '\n';
        return 2;
    }
}

int cmd_calibrate(const std::string& suite_name, std::size_t trials, std::uint64_t seed, const std::string& output) {
    try {
        const auto report = asymvol::calibrate(asymvol::suite_from(suite_name), trials, seed);
        for (const auto& c : report.checks) {
            std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << " rate=" << asymvol::format_number(c.rate())
                      << " se=" << asymvol::format_number(c.standard_error()) << " band=["
                      << asymvol::format_number(c.band_lo) << ", " << asymvol::format_number(c.band_hi)
                      << "] trials=" << c.usable() << '\n';
        }
        const auto path = output.empty() ? asymvol::default_output_dir() / ("calibration_" + suite_name + ".json")
                                         : std::filesystem::path(output);
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << asymvol::to_json(report).dump(2) << '\n';
        std::cout << "summary: " << path.string() << '\n';
        return report.pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "asymvol calibrate: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implied vs realized volatility analysis pipeline"};
    app.require_subcommand(1);

    PipelineFlags pf;
    auto* pipeline = app.add_subcommand("pipeline", "Run ingest, grid, battery, regressions, event studies and report");
    pipeline->add_option("-c,--config", pf.config, "JSON run configuration")->check(CLI::ExistingFile);
    pipeline->add_option("--index", pf.index, "Index close CSV");
    pipeline->add_option("--iv-monthly", pf.iv_monthly, "Monthly implied-volatility CSV");
    pipeline->add_option("--iv-short", pf.iv_short, "Short-term implied-volatility CSV");
    pipeline->add_option("--from", pf.from, "First date (YYYY-MM-DD)");
    pipeline->add_option("--to", pf.to, "Last date (YYYY-MM-DD)");
    pipeline->add_option("--horizons", pf.horizons, "monthly|short|both");
    pipeline->add_option("--classification", pf.classification, "percentile|sign|both");
    pipeline->add_option("--tail-mode", pf.tail_mode, "restrict|dummies");
    pipeline->add_option("--cumulative", pf.cumulative, "arithmetic|log");
    pipeline->add_option("--annualization-days", pf.annualization_days);
    pipeline->add_option("--lower-q", pf.lower_q);
    pipeline->add_option("--upper-q", pf.upper_q);
    pipeline->add_option("--adf-lag", pf.adf_lag);
    pipeline->add_option("--bp-lag", pf.bp_lag);
    pipeline->add_option("--seed", pf.seed);
    pipeline->add_option("-o,--output-dir", pf.output_dir, "Run directory (default $ASYMVOL_OUTPUT_DIR)");
    pipeline->add_flag("--print-config", pf.print_config, "Print the resolved configuration and exit");

    std::string synth_spec, synth_out;
    auto* synth = app.add_subcommand("synth", "Write synthetic series from a JSON generator spec");
    synth->add_option("spec", synth_spec, "Generator spec file")->required()->check(CLI::ExistingFile);
    synth->add_option("-o,--output-dir", synth_out);

    std::string suite;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::string cal_out;
    auto* calibrate = app.add_subcommand("calibrate", "Monte Carlo size and power checks");
    calibrate->add_option("--suite", suite, "adf|box_pierce|power")
        ->required()
        ->check(CLI::IsMember({"adf", "box_pierce", "power"}));
    calibrate->add_option("--trials", trials)->check(CLI::Range(std::size_t{100}, std::size_t{10'000'000}));
    calibrate->add_option("--seed", seed);
    calibrate->add_option("--output", cal_out, "Summary JSON path");

    auto* version = app.add_subcommand("version", "Print the tool version");

    CLI11_PARSE(app, argc, argv);

    if (*pipeline) return cmd_pipeline(pf);
    if (*synth) return cmd_synth(synth_spec, synth_out);
    if (*calibrate) return cmd_calibrate(suite, trials, seed, cal_out);
    if (*version) {
        std::cout << "asymvol " << asymvol::kVersion << '\n';
        return 0;
    }
    return 1;
}
