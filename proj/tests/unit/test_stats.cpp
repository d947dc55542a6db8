#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "asymvol/stats/adf.hpp"
#include "asymvol/stats/descriptive.hpp"
#include "asymvol/stats/distributions.hpp"
#include "asymvol/stats/hypothesis.hpp"
#include "asymvol/stats/ols.hpp"
#include "asymvol/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace asymvol;
using namespace asymvol::stats;
using testutil::kind_of;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
    return synth::generate_series({synth::GaussianIid{sigma}, n, seed, 0});
}

nlohmann::json reference() {
    std::ifstream in(testutil::fixture("timeseries_reference.json"));
    return nlohmann::json::parse(in);
}

}  // namespace

TEST(Distributions, MatchScipyReferenceTable) {
    std::ifstream in(testutil::fixture("distributions.csv"));
    ASSERT_TRUE(in) << "missing distributions fixture";
    std::string line;
    std::getline(in, line);
    std::size_t checked = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string fn, xs, ds, vs;
        std::getline(ss, fn, ',');
        std::getline(ss, xs, ',');
        std::getline(ss, ds, ',');
        std::getline(ss, vs, ',');
        const double x = std::stod(xs);
        const double dof = std::stod(ds);
        const double expected = std::stod(vs);
        double got = std::nan("");
        if (fn == "t_cdf") got = student_t_cdf(x, dof);
        if (fn == "t_two_sided") got = student_t_two_sided_p(x, dof);
        if (fn == "chi2_sf") got = chi_square_sf(x, dof);
        if (fn == "chi2_cdf") got = chi_square_cdf(x, dof);
        if (fn == "normal_quantile") got = normal_quantile(x);
        if (fn == "normal_cdf") got = normal_cdf(x);
        EXPECT_NEAR(got, expected, 1e-6) << fn << "(" << x << ", " << dof << ")";
        ++checked;
    }
    EXPECT_GE(checked, 12u);
}

TEST(Distributions, OutsideDomainIsNaN) {
    EXPECT_TRUE(std::isnan(normal_quantile(0.0)));
    EXPECT_TRUE(std::isnan(normal_quantile(1.0)));
    EXPECT_TRUE(std::isnan(student_t_cdf(1.0, 0.0)));
    EXPECT_DOUBLE_EQ(student_t_two_sided_p(std::numeric_limits<double>::infinity(), 5.0), 0.0);
}

TEST(Descriptive, QuantileConvention) {
    const std::vector<double> three{3, 1, 2};
    EXPECT_DOUBLE_EQ(quantile(three, 0.5), 2.0);
    std::vector<double> hundred(100);
    for (int i = 0; i < 100; ++i) hundred[static_cast<std::size_t>(i)] = i + 1;
    EXPECT_NEAR(quantile(hundred, 0.10), 10.9, 1e-12);
    EXPECT_NEAR(quantile(hundred, 0.90), 90.1, 1e-12);
    const std::vector<double> flat(7, 4.25);
    EXPECT_DOUBLE_EQ(quantile(flat, 0.37), 4.25);
    EXPECT_EQ(kind_of([] { quantile(std::vector<double>{}, 0.5); }), ErrorKind::too_short);
    EXPECT_EQ(kind_of([&] { quantile(three, 1.5); }), ErrorKind::invalid_argument);
}

TEST(Descriptive, AutocorrelationMatchesNaiveLoop) {
    const auto x = gaussian(57, 5);
    for (std::size_t k = 1; k <= 4; ++k) EXPECT_NEAR(autocorrelation(x, k), oracle::autocorrelation(x, k), 1e-14);
}

TEST(TTest, SymmetricSampleHasZeroStatistic) {
    const std::vector<double> x{-1, 1, -1, 1};
    const auto r = t_test_zero_mean(x);
    EXPECT_DOUBLE_EQ(r.statistic, 0.0);
    EXPECT_NEAR(r.p_value, 1.0, 1e-15);
}

TEST(TTest, ConstantSampleIsDegenerate) {
    EXPECT_EQ(kind_of([] { t_test_zero_mean(std::vector<double>{1, 1, 1, 1}); }), ErrorKind::degenerate);
}

TEST(TTest, HandComputedExample) {
    const std::vector<double> x{0.1, -0.2, 0.3, 0.0, -0.1};
    const auto r = t_test_zero_mean(x);
    EXPECT_NEAR(r.detail.at("mean"), 0.02, 1e-15);
    EXPECT_NEAR(r.detail.at("sd"), 0.19235384061671346, 1e-12);
    EXPECT_NEAR(r.statistic, 0.2324, 1e-4);
    EXPECT_NEAR(r.statistic, 0.23249527748763854, 1e-12);
    EXPECT_NEAR(r.p_value, 0.8275647196020318, 1e-9);
}

TEST(TTest, ShiftMovesStatisticMonotonically) {
    const auto x = gaussian(40, 9);
    const double m = mean(x);
    double prev = -1e300;
    for (double c : {-1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0}) {
        std::vector<double> y = x;
        for (auto& v : y) v += c;
        const double t = t_test_zero_mean(y).statistic;
        EXPECT_GT(t, prev);
        prev = t;
    }
    std::vector<double> centred = x;
    for (auto& v : centred) v -= m;
    EXPECT_NEAR(t_test_zero_mean(centred).statistic, 0.0, 1e-12);
}

TEST(BoxPierce, TenPointHandExample) {
    const std::vector<double> y{0.3, -0.1, 0.4, 0.2, -0.5, 0.1, 0.0, 0.6, -0.2, 0.3};
    const auto r = box_pierce(y, 1);
    EXPECT_NEAR(r.detail.at("rho_1"), -0.4166846071044134, 1e-12);
    EXPECT_NEAR(r.statistic, 10.0 * std::pow(oracle::autocorrelation(y, 1), 2), 1e-12);
    EXPECT_NEAR(r.statistic, 1.7362606179775937, 1e-12);
    EXPECT_NEAR(r.p_value, 0.18761332949061676, 1e-9);
}

TEST(BoxPierce, ZeroAutocorrelationGivesZeroQ) {
    const auto r = box_pierce(std::vector<double>{1, 0, 0, -1}, 1);
    EXPECT_NEAR(r.statistic, 0.0, 1e-15);
    EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(BoxPierce, ErrorsAndNonNegativity) {
    EXPECT_EQ(kind_of([] { box_pierce(std::vector<double>{1, 2, 3}, 0); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([] { box_pierce(std::vector<double>{1, 2}, 1); }), ErrorKind::too_short);
    EXPECT_EQ(kind_of([] { box_pierce(std::vector<double>(10, 3.0), 1); }), ErrorKind::degenerate);
    for (std::uint64_t s = 0; s < 20; ++s) EXPECT_GE(box_pierce(gaussian(30, s), 3).statistic, 0.0);
}

TEST(BoxPierce, MatchesStatsmodels) {
    const auto ref = reference();
    for (const char* name : {"ar1", "random_walk"}) {
        const auto x = ref[name]["x"].get<std::vector<double>>();
        for (const char* lag : {"1", "3"}) {
            const auto r = box_pierce(x, static_cast<std::size_t>(std::stoi(lag)));
            const double q = ref[name]["bp"][lag]["q"].get<double>();
            EXPECT_NEAR(r.statistic, q, 1e-9 * q) << name << " lag " << lag;
        }
    }
}

TEST(Adf, MatchesStatsmodelsStatistic) {
    const auto ref = reference();
    struct Case {
        const char* key;
        std::size_t lag;
        AdfDeterministic det;
    };
    for (const char* name : {"ar1", "random_walk"}) {
        const auto x = ref[name]["x"].get<std::vector<double>>();
        for (const Case c : {Case{"adf_n_6", 6, AdfDeterministic::none}, Case{"adf_c_0", 0, AdfDeterministic::intercept},
                             Case{"adf_c_3", 3, AdfDeterministic::intercept},
                             Case{"adf_n_0", 0, AdfDeterministic::none}}) {
            const auto r = adf(x, c.lag, c.det);
            const auto& e = ref[name][c.key];
            EXPECT_NEAR(r.statistic, e["stat"].get<double>(), 1e-8) << name << ' ' << c.key;
            EXPECT_EQ(r.detail.at("nobs"), e["nobs"].get<double>()) << name << ' ' << c.key;
            EXPECT_NEAR(r.detail.at("cv_5pct"), e["cv5"].get<double>(), 1e-6) << name << ' ' << c.key;
            const double p_ref = e["p"].get<double>();
            if (p_ref > 0.01 && p_ref < 0.99) {
                EXPECT_NEAR(r.p_value, p_ref, 0.02) << name << ' ' << c.key;
            }
            if (p_ref < 0.001) {
                EXPECT_DOUBLE_EQ(r.p_value, 0.001) << name << ' ' << c.key;
            }
        }
    }
}

TEST(Adf, StationaryAr1RejectsStrongly) {
    const auto x = synth::generate_series({synth::Ar1{0.5, 1.0}, 1000, 17, 0});
    const auto r = adf(x, 6, AdfDeterministic::none);
    EXPECT_LT(r.statistic, -5.0);
    EXPECT_LT(r.p_value, 0.01);
    EXPECT_EQ(r.detail.at("p_clamped"), 1.0);
}

TEST(Adf, ScaleInvariant) {
    const auto x = synth::generate_series({synth::RandomWalk{1.0}, 200, 4, 0});
    std::vector<double> y = x;
    for (auto& v : y) v *= 37.5;
    for (auto det : {AdfDeterministic::none, AdfDeterministic::intercept}) {
        EXPECT_NEAR(adf(x, 2, det).statistic, adf(y, 2, det).statistic, 1e-9);
    }
}

TEST(Adf, TooShortSeries) {
    EXPECT_EQ(kind_of([] { adf(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}, 6); }), ErrorKind::too_short);
}

TEST(AdfTable, TabulatedLevelsMatchPublishedCoefficients) {
    // Asymptotic and finite-T critical values from the published response surfaces.
    EXPECT_NEAR(adf_critical_value(AdfDeterministic::intercept, 1e15, 0.01), -3.43035, 1e-9);
    EXPECT_NEAR(adf_critical_value(AdfDeterministic::intercept, 1e15, 0.05), -2.86154, 1e-9);
    EXPECT_NEAR(adf_critical_value(AdfDeterministic::intercept, 1e15, 0.10), -2.56677, 1e-9);
    EXPECT_NEAR(adf_critical_value(AdfDeterministic::none, 1e15, 0.05), -1.94100, 1e-9);
    const double T = 274.0;
    EXPECT_NEAR(adf_critical_value(AdfDeterministic::intercept, T, 0.05),
                -2.86154 - 2.8903 / T - 4.234 / (T * T) - 40.040 / (T * T * T), 1e-12);
    EXPECT_NEAR(adf_critical_value(AdfDeterministic::none, T, 0.01), -2.56574 - 2.2358 / T - 3.627 / (T * T), 1e-12);
}

TEST(AdfTable, QuantilesIncreaseAndPValuesInvertThem) {
    for (auto det : {AdfDeterministic::none, AdfDeterministic::intercept}) {
        for (double T : {15.0, 25.0, 50.0, 100.0, 280.0, 1000.0, 1e6}) {
            const auto curve = adf_quantiles(det, T);
            for (std::size_t i = 1; i < curve.size(); ++i) {
                EXPECT_GT(curve[i].first, curve[i - 1].first);
                EXPECT_GE(curve[i].second, curve[i - 1].second);
            }
            for (const auto& [p, q] : curve) {
                const auto [pv, clamped] = adf_p_value(det, T, q);
                if (p > 0.001 && p < 0.999) {
                    EXPECT_NEAR(pv, p, 1e-12);
                    EXPECT_FALSE(clamped);
                }
            }
            EXPECT_TRUE(adf_p_value(det, T, -50.0).second);
            EXPECT_DOUBLE_EQ(adf_p_value(det, T, -50.0).first, 0.001);
            EXPECT_DOUBLE_EQ(adf_p_value(det, T, 50.0).first, 0.999);
        }
    }
}

TEST(Ols, ExactLineFit) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> y{2, 4, 6, 8, 10};
    const auto r = ols(y, std::vector<std::vector<double>>{x}, true, {"x"});
    EXPECT_NEAR(r.coef[0], 0.0, 1e-12);
    EXPECT_NEAR(r.coef[1], 2.0, 1e-12);
    EXPECT_NEAR(r.r2, 1.0, 1e-12);
    for (double e : r.residuals) EXPECT_NEAR(e, 0.0, 1e-12);
}

TEST(Ols, ConstantResponse) {
    const auto x = gaussian(30, 2);
    const std::vector<double> y(30, 7.5);
    const auto r = ols(y, std::vector<std::vector<double>>{x}, true);
    EXPECT_NEAR(r.coef[0], 7.5, 1e-12);
    EXPECT_NEAR(r.coef[1], 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(r.r2, 1.0);
}

TEST(Ols, RandomSystemMatchesNormalEquations) {
    const std::size_t n = 50;
    const auto a = gaussian(n, 21);
    const auto b = gaussian(n, 22);
    const auto c = gaussian(n, 23);
    const auto e = gaussian(n, 24);
    std::vector<double> y(n);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = 1.0 + 0.5 * a[i] - 2.0 * b[i] + 0.25 * c[i] + e[i];
        rows.push_back({1.0, a[i], b[i], c[i]});
    }
    const auto r = ols(y, std::vector<std::vector<double>>{a, b, c}, true);
    const auto o = oracle::normal_equations(rows, y);
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_NEAR(r.coef[j], o.coef[j], 1e-10 * std::max(1.0, std::fabs(o.coef[j])));
        EXPECT_NEAR(r.se[j], o.se[j], 1e-9 * o.se[j]);
        EXPECT_NEAR(r.p_value[j], student_t_two_sided_p(o.coef[j] / o.se[j], n - 4.0), 1e-9);
    }
    EXPECT_NEAR(r.ssr, o.ssr, 1e-10 * o.ssr);
    const double nd = static_cast<double>(n);
    EXPECT_NEAR(r.aic, nd * std::log(o.ssr / nd) + 2.0 * 4.0, 1e-9);
    EXPECT_NEAR(r.bic, nd * std::log(o.ssr / nd) + 4.0 * std::log(nd), 1e-9);
    EXPECT_GE(r.r2, 0.0);
    EXPECT_LE(r.r2, 1.0);
}

TEST(Ols, FittedPlusResidualsAndOrthogonality) {
    const std::size_t n = 40;
    const auto a = gaussian(n, 31);
    const auto b = gaussian(n, 32);
    const auto y = gaussian(n, 33);
    const auto r = ols(y, std::vector<std::vector<double>>{a, b}, true);
    double dot_one = 0.0;
    double dot_a = 0.0;
    double dot_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fitted = r.coef[0] + r.coef[1] * a[i] + r.coef[2] * b[i];
        EXPECT_NEAR(fitted + r.residuals[i], y[i], 1e-10 * std::max(1.0, std::fabs(y[i])));
        dot_one += r.residuals[i];
        dot_a += r.residuals[i] * a[i];
        dot_b += r.residuals[i] * b[i];
    }
    EXPECT_NEAR(dot_one, 0.0, 1e-10);
    EXPECT_NEAR(dot_a, 0.0, 1e-10);
    EXPECT_NEAR(dot_b, 0.0, 1e-10);
}

TEST(Ols, ScalingResponseLeavesInferenceUnchanged) {
    const std::size_t n = 35;
    const auto a = gaussian(n, 41);
    const auto y = gaussian(n, 42);
    std::vector<double> y3 = y;
    for (auto& v : y3) v *= -3.0;
    const auto r1 = ols(y, std::vector<std::vector<double>>{a}, true);
    const auto r3 = ols(y3, std::vector<std::vector<double>>{a}, true);
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(r3.coef[j], -3.0 * r1.coef[j], 1e-12);
        EXPECT_NEAR(r3.se[j], 3.0 * r1.se[j], 1e-12);
        EXPECT_NEAR(r3.t_stat[j], -r1.t_stat[j], 1e-10);
        EXPECT_NEAR(r3.p_value[j], r1.p_value[j], 1e-12);
    }
}

TEST(Ols, ExtraColumnNeverRaisesSsr) {
    const std::size_t n = 45;
    const auto a = gaussian(n, 51);
    const auto z = gaussian(n, 52);
    const auto y = gaussian(n, 53);
    const auto r1 = ols(y, std::vector<std::vector<double>>{a}, true);
    const auto r2 = ols(y, std::vector<std::vector<double>>{a, z}, true);
    EXPECT_LE(r2.ssr, r1.ssr * (1.0 + 1e-12));
}

TEST(Ols, RankDeficiencyIsNamed) {
    const auto a = gaussian(20, 61);
    std::vector<double> twice = a;
    for (auto& v : twice) v *= 2.0;
    const auto y = gaussian(20, 62);
    try {
        ols(y, std::vector<std::vector<double>>{a, twice}, true, {"a", "twice"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::rank_deficient);
        const std::string msg = e.what();
        EXPECT_TRUE(msg.find("twice") != std::string::npos || msg.find("a") != std::string::npos) << msg;
    }
    EXPECT_EQ(kind_of([&] { ols(std::vector<double>{1, 2}, std::vector<std::vector<double>>{{1, 2}}, true); }),
              ErrorKind::insufficient_data);
}

TEST(Ols, NoInterceptUsesUncentredR2) {
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{1.1, 1.9, 3.2, 3.9};
    const auto r = ols(y, std::vector<std::vector<double>>{x}, false);
    double yy = 0.0;
    for (double v : y) yy += v * v;
    EXPECT_NEAR(r.r2, 1.0 - r.ssr / yy, 1e-14);
    EXPECT_EQ(r.names, std::vector<std::string>{"x1"});
}
