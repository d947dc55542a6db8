#pragma once

/**
 * @file report.hpp
 * @brief Stable CSV/JSON artifacts for the tables, figures and run manifest.
 *
 * Layout under the run directory:
 *   tables/table{1..5}.{csv,json}
 *   figures/fig1.csv                    monthly grid (IV and forward RV)
 *   figures/fig{2..7}_{fall,jump}.csv   event panels
 *   grids/{monthly,short}.csv           full grid exports
 *   run.log, manifest.json
 *
 * Numbers: 6 significant digits, scientific (uppercase E, trailing mantissa
 * zeros dropped) when 0 < |x| < 1e-4, "NA" for NaN. All formatting goes
 * through std::to_chars and is locale independent; files use LF newlines.
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asymvol/asymmetry.hpp"
#include "asymvol/detail/digest.hpp"
#include "asymvol/error.hpp"
#include "asymvol/eventstudy.hpp"
#include "asymvol/volatility.hpp"

namespace asymvol {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kScientificBelow = 1e-4;

inline std::string format_number(double x) {
    if (std::isnan(x)) return "NA";
    if (std::isinf(x)) return x > 0 ? "Inf" : "-Inf";
    if (x == 0.0) return "0";
    char buf[64];
    const bool sci = std::fabs(x) < kScientificBelow;
    const auto res = sci ? std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 5)
                         : std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
    std::string s(buf, res.ptr);
    const auto e = s.find('e');
    if (e == std::string::npos) return s;
    std::string mantissa = s.substr(0, e);
    if (mantissa.find('.') != std::string::npos) {
        while (mantissa.back() == '0') mantissa.pop_back();
        if (mantissa.back() == '.') mantissa.pop_back();
    }
    return mantissa + "E" + s.substr(e + 1);
}

namespace detail {

inline nlohmann::json number_or_null(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const stats::TestResult& t) {
    nlohmann::json j{{"name", t.name},
                     {"statistic", number_or_null(t.statistic)},
                     {"p_value", number_or_null(t.p_value)},
                     {"degenerate", t.degenerate}};
    nlohmann::json d = nlohmann::json::object();
    for (const auto& [k, v] : t.detail) d[k] = number_or_null(v);
    j["detail"] = d;
    if (!t.note.empty()) j["note"] = t.note;
    return j;
}

inline nlohmann::json to_json(const CointegrationReport& r) {
    return {{"n", r.n},
            {"slope_no_intercept", number_or_null(r.slope_no_intercept)},
            {"slope_no_intercept_se", number_or_null(r.slope_no_intercept_se)},
            {"slope_no_intercept_p", number_or_null(r.slope_no_intercept_p)},
            {"slope_with_intercept", number_or_null(r.slope_with_intercept)},
            {"intercept", number_or_null(r.intercept)},
            {"intercept_p", number_or_null(r.intercept_p)},
            {"aic_delta", number_or_null(r.aic_delta)},
            {"bic_delta", number_or_null(r.bic_delta)},
            {"residual_t_test", to_json(r.residual_t)},
            {"residual_box_pierce", to_json(r.residual_bp)},
            {"residual_adf", to_json(r.residual_adf)}};
}

inline nlohmann::json to_json(const RegressionResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        rows.push_back({{"variable", r.names[i]},
                        {"coef", number_or_null(r.coef[i])},
                        {"se", number_or_null(r.se[i])},
                        {"t", number_or_null(r.t_stat[i])},
                        {"p", number_or_null(r.p_value[i])}});
    }
    return {{"n", r.n},       {"k", r.k},       {"r2", number_or_null(r.r2)}, {"aic", number_or_null(r.aic)},
            {"bic", number_or_null(r.bic)}, {"ssr", number_or_null(r.ssr)}, {"coefficients", rows}};
}

inline nlohmann::json to_json(const EventPanel& p) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t j = 0; j < p.steps.size(); ++j) {
        steps.push_back({{"step", p.steps[j]},
                         {"mean_cum_iv", number_or_null(p.mean_cum_iv[j])},
                         {"mean_cum_rv", number_or_null(p.mean_cum_rv[j])},
                         {"diff", number_or_null(p.diff[j])},
                         {"diff_p", number_or_null(p.diff_p[j])},
                         {"n_events", p.n_events[j]}});
    }
    return steps;
}

}  // namespace detail

/// The five regressor rows of Tables 2-5, in output order.
inline const std::vector<std::string>& table_rows() {
    static const std::vector<std::string> rows{"Intercept", "shock(t-1)", "r(t)", "AR(t-1)", "Indicator(t-1)"};
    return rows;
}

/// Writes into one run directory and records every file it produces.
class OutputWriter {
public:
    explicit OutputWriter(std::filesystem::path root) : root_(std::move(root)) {}

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] const std::vector<std::string>& outputs() const noexcept { return outputs_; }

    /// Writes `content` to root/relative (parents created) and records it.
    void write(const std::string& relative, const std::string& content) {
        const auto path = root_ / relative;
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) fail(ErrorKind::io, "cannot create " + path.parent_path().string() + ": " + ec.message());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
        out << content;
        out.close();
        if (!out) fail(ErrorKind::io, "write to " + path.string() + " failed");
        if (std::find(outputs_.begin(), outputs_.end(), relative) == outputs_.end()) outputs_.push_back(relative);
    }

private:
    std::filesystem::path root_;
    std::vector<std::string> outputs_;
};

/// Battery reports per horizon for Table 1; either column may be absent.
struct Table1Input {
    std::optional<CointegrationReport> short_term;
    std::optional<CointegrationReport> long_term;
};

inline std::string table1_csv(const Table1Input& in) {
    if (!in.short_term && !in.long_term) fail(ErrorKind::incomplete, "table 1: no cointegration battery results");
    auto p = [](const std::optional<CointegrationReport>& r, const TestResult CointegrationReport::*test) {
        return r ? format_number(((*r).*test).p_value) : std::string("NA");
    };
    std::ostringstream out;
    out << "test,short,long\n";
    out << "t_test_residual," << p(in.short_term, &CointegrationReport::residual_t) << ','
        << p(in.long_term, &CointegrationReport::residual_t) << '\n';
    out << "box_pierce_residual," << p(in.short_term, &CointegrationReport::residual_bp) << ','
        << p(in.long_term, &CointegrationReport::residual_bp) << '\n';
    out << "adf_residual," << p(in.short_term, &CointegrationReport::residual_adf) << ','
        << p(in.long_term, &CointegrationReport::residual_adf) << '\n';
    return out.str();
}

inline std::string table1_json(const Table1Input& in) {
    if (!in.short_term && !in.long_term) fail(ErrorKind::incomplete, "table 1: no cointegration battery results");
    nlohmann::json j{{"schema_version", kSchemaVersion}, {"table", 1}};
    j["short"] = in.short_term ? detail::to_json(*in.short_term) : nlohmann::json(nullptr);
    j["long"] = in.long_term ? detail::to_json(*in.long_term) : nlohmann::json(nullptr);
    return j.dump(2) + "\n";
}

namespace detail {

inline void check_regression(const RegressionResult& r, int table, const char* target) {
    if (r.names != table_rows() || r.coef.size() != table_rows().size() || r.p_value.size() != r.coef.size()) {
        fail(ErrorKind::incomplete, "table " + std::to_string(table) + ": " + target +
                                        " regression missing or not in table layout");
    }
}

}  // namespace detail

inline std::string table_csv(const TableResult& t) {
    const int id = table_number(t.id);
    detail::check_regression(t.rv, id, "RV");
    detail::check_regression(t.iv, id, "IV");
    std::ostringstream out;
    out << "variable,rv_coef,rv_p,iv_coef,iv_p\n";
    for (std::size_t i = 0; i < table_rows().size(); ++i) {
        out << table_rows()[i] << ',' << format_number(t.rv.coef[i]) << ',' << format_number(t.rv.p_value[i]) << ','
            << format_number(t.iv.coef[i]) << ',' << format_number(t.iv.p_value[i]) << '\n';
    }
    return out.str();
}

inline std::string table_json(const TableResult& t) {
    const int id = table_number(t.id);
    detail::check_regression(t.rv, id, "RV");
    detail::check_regression(t.iv, id, "IV");
    nlohmann::json j{{"schema_version", kSchemaVersion},
                     {"table", id},
                     {"rv", detail::to_json(t.rv)},
                     {"iv", detail::to_json(t.iv)}};
    return j.dump(2) + "\n";
}

inline std::string figure_csv(const EventPanel& p) {
    std::ostringstream out;
    out << "step,mean_cum_iv,mean_cum_rv,diff,diff_p,n_events\n";
    for (std::size_t j = 0; j < p.steps.size(); ++j) {
        out << p.steps[j] << ',' << format_number(p.mean_cum_iv[j]) << ',' << format_number(p.mean_cum_rv[j]) << ','
            << format_number(p.diff[j]) << ',' << format_number(p.diff_p[j]) << ',' << p.n_events[j] << '\n';
    }
    return out.str();
}

inline std::string grid_csv(const VolGrid& grid, std::span<const ShockLabel> labels = {}) {
    std::ostringstream out;
    write_grid_csv(grid, labels, out);
    return out.str();
}

inline void emit_table1(const Table1Input& in, OutputWriter& w) {
    const auto csv = table1_csv(in);
    const auto json = table1_json(in);
    w.write("tables/table1.csv", csv);
    w.write("tables/table1.json", json);
}

inline void emit_table(const TableResult& t, OutputWriter& w) {
    const auto csv = table_csv(t);
    const auto json = table_json(t);
    const auto stem = "tables/table" + std::to_string(table_number(t.id));
    w.write(stem + ".csv", csv);
    w.write(stem + ".json", json);
}

inline std::string figure_path(int figure_id, ShockLabel label) {
    return "figures/fig" + std::to_string(figure_id) + "_" + std::string(to_string(label)) + ".csv";
}

inline void emit_figure(const EventPanel& p, int figure_id, OutputWriter& w) {
    w.write(figure_path(figure_id, p.label), figure_csv(p));
}

struct RunManifest {
    std::string config_hash;
    std::map<std::string, std::string> input_digests;
    std::string version;
    std::vector<std::string> outputs;  ///< sorted, relative to the run directory

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

inline nlohmann::json to_json(const RunManifest& m) {
    return {{"schema_version", kSchemaVersion},
            {"config_hash", m.config_hash},
            {"input_digests", m.input_digests},
            {"version", m.version},
            {"outputs", m.outputs}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    try {
        RunManifest m;
        m.config_hash = j.at("config_hash").get<std::string>();
        m.input_digests = j.at("input_digests").get<std::map<std::string, std::string>>();
        m.version = j.at("version").get<std::string>();
        m.outputs = j.at("outputs").get<std::vector<std::string>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, std::string("manifest: ") + e.what());
    }
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open manifest " + path.string());
    try {
        return manifest_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::parse, std::string("manifest: ") + e.what());
    }
}

/// Relative paths of every regular file under `root`, sorted.
inline std::vector<std::string> files_under(const std::filesystem::path& root) {
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) out.push_back(entry.path().lexically_relative(root).generic_string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Writes manifest.json (listing itself) and checks the directory holds
/// exactly the manifest's outputs.
inline RunManifest write_manifest(OutputWriter& w, std::string config_hash, std::map<std::string, std::string> inputs,
                                  std::string version) {
    RunManifest m{std::move(config_hash), std::move(inputs), std::move(version), w.outputs()};
    m.outputs.push_back("manifest.json");
    std::sort(m.outputs.begin(), m.outputs.end());
    m.outputs.erase(std::unique(m.outputs.begin(), m.outputs.end()), m.outputs.end());
    w.write("manifest.json", to_json(m).dump(2) + "\n");
    const auto on_disk = files_under(w.root());
    if (on_disk != m.outputs) {
        std::vector<std::string> extra;
        std::set_difference(on_disk.begin(), on_disk.end(), m.outputs.begin(), m.outputs.end(),
                            std::back_inserter(extra));
        fail(ErrorKind::incomplete, "run directory " + w.root().string() + " holds " +
                                        std::to_string(on_disk.size()) + " files but the manifest lists " +
                                        std::to_string(m.outputs.size()) +
                                        (extra.empty() ? std::string() : "; unlisted: " + extra.front()));
    }
    return m;
}

}  // namespace asymvol
