#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "asymvol/report.hpp"
#include "helpers.hpp"

using namespace asymvol;
using testutil::kind_of;

namespace {

CointegrationReport battery(double t_p, double bp_p, double adf_p) {
    CointegrationReport r;
    r.n = 100;
    r.residual_t.p_value = t_p;
    r.residual_bp.p_value = bp_p;
    r.residual_adf.p_value = adf_p;
    return r;
}

RegressionResult regression(double scale) {
    RegressionResult r;
    r.names = table_rows();
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        r.coef.push_back(scale * static_cast<double>(i + 1));
        r.se.push_back(0.1);
        r.t_stat.push_back(1.0);
        r.p_value.push_back(0.01 * static_cast<double>(i + 1));
    }
    r.n = 50;
    r.k = 5;
    return r;
}

EventPanel panel(ShockLabel label) {
    EventPanel p;
    p.label = label;
    p.mean_cum_iv = {0.0, 0.1, 0.15, 0.12};
    p.mean_cum_rv = {0.0, 0.05, 0.08, 0.1};
    for (std::size_t j = 0; j < 4; ++j) {
        p.diff[j] = p.mean_cum_iv[j] - p.mean_cum_rv[j];
        p.n_events[j] = 12;
    }
    p.diff_p = {std::numeric_limits<double>::quiet_NaN(), 0.02, 0.2, 0.7};
    return p;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Report, NumberFormatting) {
    EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "NA");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "Inf");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-Inf");
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(-56.4218), "-56.4218");
    EXPECT_EQ(format_number(0.123456789), "0.123457");
    EXPECT_EQ(format_number(6.1037e-16), "6.1037E-16");
    EXPECT_EQ(format_number(1.2e-5), "1.2E-05");
    EXPECT_EQ(format_number(0.0001), "0.0001");
}

TEST(Report, Table1HasThreeRows) {
    const auto csv = table1_csv({battery(0.4, 0.3, 0.001), battery(0.5, 6.1037e-16, 0.001)});
    const auto l = lines(csv);
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "test,short,long");
    EXPECT_EQ(l[1], "t_test_residual,0.4,0.5");
    EXPECT_EQ(l[2], "box_pierce_residual,0.3,6.1037E-16");
    EXPECT_EQ(l[3], "adf_residual,0.001,0.001");
}

TEST(Report, Table1MissingColumnIsNA) {
    Table1Input in;
    in.long_term = battery(0.5, 0.2, 0.01);
    const auto l = lines(table1_csv(in));
    EXPECT_EQ(l[1], "t_test_residual,NA,0.5");
    EXPECT_EQ(kind_of([] { table1_csv({}); }), ErrorKind::incomplete);
    const auto j = nlohmann::json::parse(table1_json(in));
    EXPECT_TRUE(j["short"].is_null());
    EXPECT_EQ(j["schema_version"], kSchemaVersion);
}

TEST(Report, RegressionTableLayout) {
    TableResult t{TableId::T4, regression(1.0), regression(-2.0)};
    const auto l = lines(table_csv(t));
    ASSERT_EQ(l.size(), 6u);
    EXPECT_EQ(l[0], "variable,rv_coef,rv_p,iv_coef,iv_p");
    EXPECT_EQ(l[5], "Indicator(t-1),5,0.05,-10,0.05");
    const auto j = nlohmann::json::parse(table_json(t));
    EXPECT_EQ(j["table"], 4);
}

TEST(Report, IncompleteRegressionIsRejected) {
    TableResult t{TableId::T2, regression(1.0), RegressionResult{}};
    EXPECT_EQ(kind_of([&] { table_csv(t); }), ErrorKind::incomplete);
    auto short_names = regression(1.0);
    short_names.names.pop_back();
    EXPECT_EQ(kind_of([&] { table_json(TableResult{TableId::T3, short_names, regression(1.0)}); }),
              ErrorKind::incomplete);
}

TEST(Report, FigureCsvHasFourSteps) {
    const auto l = lines(figure_csv(panel(ShockLabel::fall)));
    ASSERT_EQ(l.size(), 5u);
    EXPECT_EQ(l[0], "step,mean_cum_iv,mean_cum_rv,diff,diff_p,n_events");
    EXPECT_EQ(l[1], "-1,0,0,0,NA,12");
    EXPECT_EQ(l[2], "0,0.1,0.05,0.05,0.02,12");
    EXPECT_EQ(figure_path(4, ShockLabel::fall), "figures/fig4_fall.csv");
    EXPECT_EQ(figure_path(7, ShockLabel::jump), "figures/fig7_jump.csv");
}

TEST(Report, ReemitIsByteIdentical) {
    testutil::TempDir a;
    testutil::TempDir b;
    auto emit = [](const std::filesystem::path& root) {
        OutputWriter w(root);
        emit_table1({battery(0.4, 0.3, 0.001), std::nullopt}, w);
        emit_table({TableId::T4, regression(1.0), regression(0.5)}, w);
        emit_figure(panel(ShockLabel::jump), 5, w);
        return write_manifest(w, "abc", {{"index", "00"}}, "0.1.0");
    };
    const auto ma = emit(a.path());
    const auto mb = emit(b.path());
    EXPECT_EQ(ma, mb);
    for (const auto& f : ma.outputs) EXPECT_EQ(testutil::slurp(a / f), testutil::slurp(b / f)) << f;
    EXPECT_EQ(load_manifest(a / "manifest.json"), ma);
}

TEST(Report, ManifestListsExactlyTheRunDirectory) {
    testutil::TempDir tmp;
    OutputWriter w(tmp.path());
    emit_figure(panel(ShockLabel::fall), 2, w);
    const auto m = write_manifest(w, "h", {}, "v");
    EXPECT_EQ(m.outputs, (std::vector<std::string>{"figures/fig2_fall.csv", "manifest.json"}));
    EXPECT_EQ(files_under(tmp.path()), m.outputs);

    testutil::TempDir dirty;
    testutil::spit(dirty / "stray.txt", "x");
    OutputWriter w2(dirty.path());
    emit_figure(panel(ShockLabel::fall), 2, w2);
    EXPECT_EQ(kind_of([&] { write_manifest(w2, "h", {}, "v"); }), ErrorKind::incomplete);
}
