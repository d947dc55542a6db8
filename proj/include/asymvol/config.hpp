#pragma once

/**
 * @file config.hpp
 * @brief RunConfig and the synthetic-market spec file, both JSON.
 *
 * Precedence is flags > file > environment > defaults. The environment only
 * supplies the default output directory (ASYMVOL_OUTPUT_DIR). Relative input
 * paths in a file resolve against the file's directory; the resolved config
 * holds absolute, lexically normal paths, and is what the config hash covers.
 *
 * Example:
 *   {
 *     "inputs": {
 *       "index":      {"path": "index.csv"},
 *       "iv_monthly": {"path": "iv_monthly.csv", "close_column": "vix"}
 *     },
 *     "horizons": "monthly",
 *     "classification": "sign"
 *   }
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "asymvol/asymmetry.hpp"
#include "asymvol/detail/digest.hpp"
#include "asymvol/error.hpp"
#include "asymvol/eventstudy.hpp"
#include "asymvol/ingest.hpp"
#include "asymvol/synth.hpp"
#include "asymvol/volatility.hpp"

namespace asymvol {

inline constexpr const char* kOutputDirEnv = "ASYMVOL_OUTPUT_DIR";

enum class HorizonSelection { monthly, short_term, both };
enum class Classification { percentile, sign, both };

struct InputSpec {
    std::filesystem::path path;
    CsvSchema schema;

    friend bool operator==(const InputSpec&, const InputSpec&) = default;
};

struct RunConfig {
    std::optional<InputSpec> index;
    std::optional<InputSpec> iv_monthly;
    std::optional<InputSpec> iv_short;
    std::optional<Date> start_date;
    std::optional<Date> end_date;
    HorizonSelection horizons = HorizonSelection::monthly;
    std::size_t annualization_days = kDefaultAnnualizationDays;
    Classification classification = Classification::sign;
    double lower_q = 0.10;
    double upper_q = 0.90;
    TailMode tail_mode = TailMode::restrict;
    CumulativeKind cumulative = CumulativeKind::arithmetic;
    std::size_t adf_lag = 6;
    std::size_t bp_lag = 1;
    std::filesystem::path output_dir = "asymvol-out";
    std::uint64_t seed = 0;

    [[nodiscard]] bool wants_monthly() const noexcept { return horizons != HorizonSelection::short_term; }
    [[nodiscard]] bool wants_short() const noexcept { return horizons != HorizonSelection::monthly; }
    [[nodiscard]] bool wants_percentile() const noexcept { return classification != Classification::sign; }
    [[nodiscard]] bool wants_sign() const noexcept { return classification != Classification::percentile; }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

template <typename E, std::size_t N>
E enum_from(const std::string& text, const std::array<std::pair<const char*, E>, N>& table, const char* what) {
    for (const auto& [name, value] : table) {
        if (text == name) return value;
    }
    std::string options;
    for (const auto& [name, value] : table) options += (options.empty() ? "" : "|") + std::string(name);
    fail(ErrorKind::invalid_spec, std::string(what) + " '" + text + "' is not one of " + options);
}

template <typename E, std::size_t N>
std::string enum_name(E value, const std::array<std::pair<const char*, E>, N>& table) {
    for (const auto& [name, v] : table) {
        if (v == value) return name;
    }
    return "?";
}

inline constexpr std::array<std::pair<const char*, HorizonSelection>, 3> kHorizonNames{
    {{"monthly", HorizonSelection::monthly}, {"short", HorizonSelection::short_term}, {"both", HorizonSelection::both}}};
inline constexpr std::array<std::pair<const char*, Classification>, 3> kClassificationNames{
    {{"percentile", Classification::percentile}, {"sign", Classification::sign}, {"both", Classification::both}}};
inline constexpr std::array<std::pair<const char*, TailMode>, 2> kTailModeNames{
    {{"restrict", TailMode::restrict}, {"dummies", TailMode::dummies}}};
inline constexpr std::array<std::pair<const char*, CumulativeKind>, 2> kCumulativeNames{
    {{"arithmetic", CumulativeKind::arithmetic}, {"log", CumulativeKind::log}}};

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where) {
    if (!j.is_object()) fail(ErrorKind::parse, std::string(where) + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) fail(ErrorKind::parse, std::string(where) + ": unknown key '" + key + "'");
    }
}

inline std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
    const auto abs = p.is_absolute() ? p : base / p;
    return abs.lexically_normal();
}

inline Date date_from(const std::string& text, const char* what) {
    const auto d = parse_date(text);
    if (!d) fail(ErrorKind::parse, std::string(what) + ": '" + text + "' is not an ISO date");
    return *d;
}

inline InputSpec input_from_json(const nlohmann::json& j, const std::filesystem::path& base, const char* where) {
    reject_unknown_keys(j, {"path", "date_column", "close_column", "delimiter", "date_format"}, where);
    InputSpec in;
    if (!j.contains("path")) fail(ErrorKind::parse, std::string(where) + ": missing 'path'");
    in.path = resolve(j.at("path").get<std::string>(), base);
    if (j.contains("date_column")) in.schema.date_column = j.at("date_column").get<std::string>();
    if (j.contains("close_column")) in.schema.close_column = j.at("close_column").get<std::string>();
    if (j.contains("delimiter")) {
        const auto d = j.at("delimiter").get<std::string>();
        if (d.size() != 1) fail(ErrorKind::parse, std::string(where) + ": delimiter must be one character");
        in.schema.delimiter = d[0];
    }
    if (j.contains("date_format")) in.schema.date_format = j.at("date_format").get<std::string>();
    return in;
}

inline nlohmann::json input_to_json(const InputSpec& in) {
    return {{"path", in.path.generic_string()},
            {"date_column", in.schema.date_column},
            {"close_column", in.schema.close_column},
            {"delimiter", std::string(1, in.schema.delimiter)},
            {"date_format", in.schema.date_format}};
}

inline nlohmann::json read_json_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, std::string("cannot open ") + what + " " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::parse, path.string() + ": " + e.what());
    }
}

}  // namespace detail

inline std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    return RunConfig{}.output_dir;
}

/// Defaults with the environment applied.
inline RunConfig default_config() {
    RunConfig c;
    c.output_dir = default_output_dir();
    return c;
}

inline void validate(const RunConfig& c) {
    if (!c.index) fail(ErrorKind::invalid_spec, "config: inputs.index is required");
    if (c.wants_monthly() && !c.iv_monthly) {
        fail(ErrorKind::invalid_spec, "config: horizons include monthly but inputs.iv_monthly is missing");
    }
    if (c.wants_short() && !c.iv_short) {
        fail(ErrorKind::invalid_spec, "config: horizons include short but inputs.iv_short is missing");
    }
    if (c.start_date && c.end_date && *c.end_date < *c.start_date) {
        fail(ErrorKind::invalid_spec, "config: end_date precedes start_date");
    }
    if (c.annualization_days == 0) fail(ErrorKind::invalid_spec, "config: annualization_days must be positive");
    if (c.bp_lag == 0) fail(ErrorKind::invalid_spec, "config: bp_lag must be positive");
    ShockClass::percentile(c.lower_q, c.upper_q).validate();
    if (c.output_dir.empty()) fail(ErrorKind::invalid_spec, "config: output_dir is empty");
}

/// Overlays the keys present in `j` onto `base`.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = default_config(),
                                  const std::filesystem::path& base_dir = std::filesystem::current_path()) {
    using namespace detail;
    try {
        reject_unknown_keys(j,
                            {"inputs", "start_date", "end_date", "horizons", "annualization_days", "classification",
                             "lower_q", "upper_q", "tail_mode", "cumulative", "adf_lag", "bp_lag", "output_dir",
                             "seed"},
                            "config");
        RunConfig c = std::move(base);
        if (j.contains("inputs")) {
            const auto& in = j.at("inputs");
            reject_unknown_keys(in, {"index", "iv_monthly", "iv_short"}, "config.inputs");
            if (in.contains("index")) c.index = input_from_json(in.at("index"), base_dir, "inputs.index");
            if (in.contains("iv_monthly")) {
                c.iv_monthly = input_from_json(in.at("iv_monthly"), base_dir, "inputs.iv_monthly");
            }
            if (in.contains("iv_short")) c.iv_short = input_from_json(in.at("iv_short"), base_dir, "inputs.iv_short");
        }
        auto opt_date = [&](const char* key, std::optional<Date>& out) {
            if (!j.contains(key)) return;
            out = j.at(key).is_null() ? std::nullopt
                                      : std::optional<Date>(date_from(j.at(key).get<std::string>(), key));
        };
        opt_date("start_date", c.start_date);
        opt_date("end_date", c.end_date);
        if (j.contains("horizons")) c.horizons = enum_from(j.at("horizons").get<std::string>(), kHorizonNames, "horizons");
        if (j.contains("classification")) {
            c.classification =
                enum_from(j.at("classification").get<std::string>(), kClassificationNames, "classification");
        }
        if (j.contains("tail_mode")) c.tail_mode = enum_from(j.at("tail_mode").get<std::string>(), kTailModeNames, "tail_mode");
        if (j.contains("cumulative")) {
            c.cumulative = enum_from(j.at("cumulative").get<std::string>(), kCumulativeNames, "cumulative");
        }
        if (j.contains("annualization_days")) c.annualization_days = j.at("annualization_days").get<std::size_t>();
        if (j.contains("lower_q")) c.lower_q = j.at("lower_q").get<double>();
        if (j.contains("upper_q")) c.upper_q = j.at("upper_q").get<double>();
        if (j.contains("adf_lag")) c.adf_lag = j.at("adf_lag").get<std::size_t>();
        if (j.contains("bp_lag")) c.bp_lag = j.at("bp_lag").get<std::size_t>();
        if (j.contains("output_dir")) c.output_dir = resolve(j.at("output_dir").get<std::string>(), base_dir);
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, std::string("config: ") + e.what());
    }
}

inline nlohmann::json to_json(const RunConfig& c) {
    using namespace detail;
    nlohmann::json inputs = nlohmann::json::object();
    if (c.index) inputs["index"] = input_to_json(*c.index);
    if (c.iv_monthly) inputs["iv_monthly"] = input_to_json(*c.iv_monthly);
    if (c.iv_short) inputs["iv_short"] = input_to_json(*c.iv_short);
    auto date_or_null = [](const std::optional<Date>& d) {
        return d ? nlohmann::json(format_date(*d)) : nlohmann::json(nullptr);
    };
    return {{"inputs", inputs},
            {"start_date", date_or_null(c.start_date)},
            {"end_date", date_or_null(c.end_date)},
            {"horizons", enum_name(c.horizons, kHorizonNames)},
            {"annualization_days", c.annualization_days},
            {"classification", enum_name(c.classification, kClassificationNames)},
            {"lower_q", c.lower_q},
            {"upper_q", c.upper_q},
            {"tail_mode", enum_name(c.tail_mode, kTailModeNames)},
            {"cumulative", enum_name(c.cumulative, kCumulativeNames)},
            {"adf_lag", c.adf_lag},
            {"bp_lag", c.bp_lag},
            {"output_dir", c.output_dir.generic_string()},
            {"seed", c.seed}};
}

/// Compact, key-sorted JSON of the resolved config.
inline std::string canonical_json(const RunConfig& c) { return to_json(c).dump(); }

inline std::string config_hash(const RunConfig& c) { return detail::sha256_hex(canonical_json(c)); }

inline RunConfig load_config(const std::filesystem::path& path, RunConfig base = default_config()) {
    const auto j = detail::read_json_file(path, "config");
    const auto dir = std::filesystem::absolute(path).parent_path();
    return config_from_json(j, std::move(base), dir);
}

// ---------------------------------------------------------------------------
// Synthetic market spec (the `synth` subcommand and the bundled fixtures)
// ---------------------------------------------------------------------------

namespace detail {

inline synth::Process process_from_json(const nlohmann::json& j, const char* where) {
    if (!j.contains("kind")) fail(ErrorKind::invalid_spec, std::string(where) + ": missing 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    auto num = [&](const char* key, double fallback) { return j.contains(key) ? j.at(key).get<double>() : fallback; };
    if (kind == "gaussian_iid") {
        reject_unknown_keys(j, {"kind", "sigma", "n"}, where);
        return synth::GaussianIid{num("sigma", synth::GaussianIid{}.sigma)};
    }
    if (kind == "random_walk") {
        reject_unknown_keys(j, {"kind", "sigma", "n"}, where);
        return synth::RandomWalk{num("sigma", synth::RandomWalk{}.sigma)};
    }
    if (kind == "ar1") {
        reject_unknown_keys(j, {"kind", "phi", "sigma", "n"}, where);
        return synth::Ar1{num("phi", synth::Ar1{}.phi), num("sigma", synth::Ar1{}.sigma)};
    }
    if (kind == "garch11") {
        reject_unknown_keys(j, {"kind", "omega", "alpha", "beta", "n"}, where);
        const synth::Garch11 d;
        return synth::Garch11{num("omega", d.omega), num("alpha", d.alpha), num("beta", d.beta)};
    }
    if (kind == "gjr_garch") {
        reject_unknown_keys(j, {"kind", "omega", "alpha", "gamma", "beta", "n"}, where);
        const synth::GjrGarch d;
        return synth::GjrGarch{num("omega", d.omega), num("alpha", d.alpha), num("gamma", d.gamma),
                               num("beta", d.beta)};
    }
    fail(ErrorKind::invalid_spec, std::string(where) + ": unknown generator kind '" + kind + "'");
}

inline nlohmann::json process_to_json(const synth::Process& p) {
    nlohmann::json j{{"kind", synth::process_name(p)}};
    std::visit(
        [&](const auto& v) {
            using P = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<P, synth::GaussianIid> || std::is_same_v<P, synth::RandomWalk>) {
                j["sigma"] = v.sigma;
            } else if constexpr (std::is_same_v<P, synth::Ar1>) {
                j["phi"] = v.phi;
                j["sigma"] = v.sigma;
            } else if constexpr (std::is_same_v<P, synth::Garch11>) {
                j["omega"] = v.omega;
                j["alpha"] = v.alpha;
                j["beta"] = v.beta;
            } else {
                j["omega"] = v.omega;
                j["alpha"] = v.alpha;
                j["gamma"] = v.gamma;
                j["beta"] = v.beta;
            }
        },
        p);
    return j;
}

inline HorizonSpec horizon_from_name(const std::string& name) {
    if (name == "monthly") return HorizonSpec::monthly();
    if (name == "short") return HorizonSpec::short_term();
    fail(ErrorKind::invalid_spec, "horizon '" + name + "' is not one of monthly|short");
}

}  // namespace detail

/**
 * Synthetic data spec. With a return-process `returns` and optional
 * cointegrated IV series:
 *   {
 *     "seed": 42, "n": 5000, "start_date": "2000-01-03", "start_level": 1000,
 *     "returns": {"kind": "gjr_garch", "omega": 1e-6, "alpha": 0.05, "gamma": 0.10, "beta": 0.85},
 *     "iv": [{"name": "iv_monthly", "horizon": "monthly", "slope": 0.86,
 *             "noise": {"kind": "gaussian_iid", "sigma": 0.5}}]
 *   }
 * A random_walk or ar1 `returns` process writes its raw draws instead.
 */
struct SynthFileSpec {
    synth::MarketSpec market;
    std::optional<std::filesystem::path> output_dir;
};

inline SynthFileSpec synth_spec_from_json(const nlohmann::json& j,
                                          const std::filesystem::path& base_dir = std::filesystem::current_path()) {
    using namespace detail;
    try {
        reject_unknown_keys(j, {"seed", "n", "start_date", "start_level", "annualization_days", "returns", "iv",
                                "output_dir"},
                            "synth spec");
        SynthFileSpec s;
        auto& m = s.market;
        m.iv.clear();
        m.returns.seed = j.value("seed", std::uint64_t{0});
        m.returns.n = j.value("n", m.returns.n);
        if (j.contains("returns")) {
            const auto& r = j.at("returns");
            m.returns.process = process_from_json(r, "synth spec.returns");
            if (r.contains("n")) m.returns.n = r.at("n").get<std::size_t>();
        }
        if (j.contains("start_date")) m.start = date_from(j.at("start_date").get<std::string>(), "start_date");
        m.start_level = j.value("start_level", m.start_level);
        m.annualization_days = j.value("annualization_days", m.annualization_days);
        if (j.contains("iv")) {
            std::uint64_t stream = 1;
            for (const auto& item : j.at("iv")) {
                reject_unknown_keys(item, {"name", "horizon", "slope", "noise", "stream"}, "synth spec.iv[]");
                synth::IvSpec iv;
                iv.name = item.value("name", std::string("iv") + std::to_string(stream));
                iv.horizon = horizon_from_name(item.value("horizon", std::string("monthly")));
                iv.slope = item.value("slope", iv.slope);
                if (item.contains("noise")) iv.noise.process = process_from_json(item.at("noise"), "synth spec.iv[].noise");
                iv.noise.seed = m.returns.seed;
                iv.noise.stream = item.value("stream", stream);
                ++stream;
                m.iv.push_back(std::move(iv));
            }
        }
        if (j.contains("output_dir")) s.output_dir = resolve(j.at("output_dir").get<std::string>(), base_dir);
        synth::validate(m.returns);
        for (const auto& iv : m.iv) {
            auto probe = iv.noise;
            probe.n = 1;
            synth::validate(probe);
            if (!(iv.slope > 0.0)) fail(ErrorKind::invalid_spec, "synth spec: iv '" + iv.name + "' slope must be positive");
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, std::string("synth spec: ") + e.what());
    }
}

inline nlohmann::json to_json(const SynthFileSpec& s) {
    using namespace detail;
    const auto& m = s.market;
    nlohmann::json iv = nlohmann::json::array();
    for (const auto& item : m.iv) {
        iv.push_back({{"name", item.name},
                      {"horizon", item.horizon.window_days == HorizonSpec::short_term().window_days ? "short" : "monthly"},
                      {"slope", item.slope},
                      {"noise", process_to_json(item.noise.process)},
                      {"stream", item.noise.stream}});
    }
    nlohmann::json j{{"seed", m.returns.seed},
                     {"n", m.returns.n},
                     {"start_date", format_date(m.start)},
                     {"start_level", m.start_level},
                     {"annualization_days", m.annualization_days},
                     {"returns", process_to_json(m.returns.process)},
                     {"iv", iv}};
    if (s.output_dir) j["output_dir"] = s.output_dir->generic_string();
    return j;
}

inline SynthFileSpec load_synth_spec(const std::filesystem::path& path) {
    const auto j = detail::read_json_file(path, "synth spec");
    return synth_spec_from_json(j, std::filesystem::absolute(path).parent_path());
}

}  // namespace asymvol
