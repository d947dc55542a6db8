#pragma once

/**
 * @file synth.hpp
 * @brief Seed-deterministic synthetic processes used as test oracles.
 *
 * Random numbers: std::mt19937_64 (bit-exact across conforming standard
 * libraries) seeded with splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15).
 * Distinct streams of one seed are independent generators; Monte Carlo
 * harnesses use seed = base + trial. Uniforms are ((x >> 11) + 0.5) / 2^53,
 * strictly inside (0, 1); normals are the inverse normal CDF of a uniform.
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "asymvol/error.hpp"
#include "asymvol/ingest.hpp"
#include "asymvol/stats/distributions.hpp"
#include "asymvol/volatility.hpp"

namespace asymvol::synth {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(splitmix64(seed + (stream + 1) * 0x9E3779B97F4A7C15ULL)) {}

    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return stats::normal_quantile(uniform()); }

private:
    std::mt19937_64 engine_;
};

struct GaussianIid {
    double sigma = 0.01;
};
struct RandomWalk {
    double sigma = 1.0;
};
struct Ar1 {
    double phi = 0.5;
    double sigma = 1.0;
};
struct Garch11 {
    double omega = 1e-6;
    double alpha = 0.05;
    double beta = 0.90;
};
struct GjrGarch {
    double omega = 1e-6;
    double alpha = 0.05;
    double gamma = 0.10;
    double beta = 0.85;
};

using Process = std::variant<GaussianIid, RandomWalk, Ar1, Garch11, GjrGarch>;

struct GeneratorSpec {
    Process process = GaussianIid{};
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

inline std::string process_name(const Process& p) {
    struct {
        std::string operator()(const GaussianIid&) const { return "gaussian_iid"; }
        std::string operator()(const RandomWalk&) const { return "random_walk"; }
        std::string operator()(const Ar1&) const { return "ar1"; }
        std::string operator()(const Garch11&) const { return "garch11"; }
        std::string operator()(const GjrGarch&) const { return "gjr_garch"; }
    } visitor;
    return std::visit(visitor, p);
}

/// True for processes whose draws are daily returns (rather than levels).
inline bool is_return_process(const Process& p) {
    return !std::holds_alternative<RandomWalk>(p) && !std::holds_alternative<Ar1>(p);
}

inline void validate(const GeneratorSpec& spec) {
    if (spec.n == 0) fail(ErrorKind::invalid_spec, "generator length must be positive");
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::invalid_spec, std::string(what) + " must be positive");
    };
    auto non_negative = [](double v, const char* what) {
        if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::invalid_spec, std::string(what) + " must be non-negative");
    };
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, GaussianIid> || std::is_same_v<P, RandomWalk>) {
                positive(p.sigma, "sigma");
            } else if constexpr (std::is_same_v<P, Ar1>) {
                positive(p.sigma, "sigma");
                if (!(std::fabs(p.phi) < 1.0)) fail(ErrorKind::invalid_spec, "ar1 requires |phi| < 1");
            } else if constexpr (std::is_same_v<P, Garch11>) {
                positive(p.omega, "omega");
                non_negative(p.alpha, "alpha");
                non_negative(p.beta, "beta");
                if (!(p.alpha + p.beta < 1.0)) fail(ErrorKind::invalid_spec, "garch11 requires alpha + beta < 1");
            } else {
                positive(p.omega, "omega");
                non_negative(p.alpha, "alpha");
                non_negative(p.gamma, "gamma");
                non_negative(p.beta, "beta");
                if (!(p.alpha + p.gamma / 2.0 + p.beta < 1.0)) {
                    fail(ErrorKind::invalid_spec, "gjr_garch requires alpha + gamma/2 + beta < 1");
                }
            }
        },
        spec.process);
}

namespace detail {

/// h_{t+1} = omega + (alpha + gamma 1[r_t < 0]) r_t^2 + beta h_t, started at
/// the unconditional variance.
inline std::vector<double> gjr_path(double omega, double alpha, double gamma, double beta, std::size_t n, Rng& rng) {
    std::vector<double> r(n);
    double h = omega / (1.0 - alpha - gamma / 2.0 - beta);
    for (std::size_t t = 0; t < n; ++t) {
        r[t] = std::sqrt(h) * rng.normal();
        h = omega + (alpha + (r[t] < 0.0 ? gamma : 0.0)) * r[t] * r[t] + beta * h;
    }
    return r;
}

}  // namespace detail

/// Raw draws: returns for the iid/GARCH kinds, levels for random_walk and ar1.
inline std::vector<double> generate_series(const GeneratorSpec& spec) {
    validate(spec);
    Rng rng(spec.seed, spec.stream);
    const std::size_t n = spec.n;
    return std::visit(
        [&](const auto& p) -> std::vector<double> {
            using P = std::decay_t<decltype(p)>;
            std::vector<double> x(n);
            if constexpr (std::is_same_v<P, GaussianIid>) {
                for (auto& v : x) v = p.sigma * rng.normal();
            } else if constexpr (std::is_same_v<P, RandomWalk>) {
                double level = 0.0;
                for (auto& v : x) {
                    level += p.sigma * rng.normal();
                    v = level;
                }
            } else if constexpr (std::is_same_v<P, Ar1>) {
                double prev = p.sigma / std::sqrt(1.0 - p.phi * p.phi) * rng.normal();
                for (auto& v : x) {
                    prev = p.phi * prev + p.sigma * rng.normal();
                    v = prev;
                }
            } else if constexpr (std::is_same_v<P, Garch11>) {
                x = detail::gjr_path(p.omega, p.alpha, 0.0, p.beta, n, rng);
            } else {
                x = detail::gjr_path(p.omega, p.alpha, p.gamma, p.beta, n, rng);
            }
            return x;
        },
        spec.process);
}

inline constexpr Date kDefaultStartDate{std::chrono::year{2000}, std::chrono::January, std::chrono::day{3}};

/// Draws dated on consecutive weekdays from `start`.
inline ReturnSeries generate_returns(const GeneratorSpec& spec, Date start = kDefaultStartDate,
                                     std::string name = "synthetic") {
    const auto x = generate_series(spec);
    const auto dates = business_days(start, x.size());
    ReturnSeries out{std::move(name), {}};
    out.points.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.points.push_back({dates[i], x[i]});
    return out;
}

/// IV_t = (RV_t - e_t) / slope with e drawn from `noise` (its length is the
/// number of cells), so RV = slope * IV + e holds exactly.
inline std::vector<double> generate_iv_for(std::span<const double> rv, double slope, GeneratorSpec noise) {
    if (!(slope > 0.0)) fail(ErrorKind::invalid_spec, "generate_iv_for: slope must be positive");
    noise.n = rv.size();
    const auto e = generate_series(noise);
    std::vector<double> iv(rv.size());
    for (std::size_t i = 0; i < rv.size(); ++i) {
        iv[i] = (rv[i] - e[i]) / slope;
        if (!(iv[i] > 0.0)) {
            fail(ErrorKind::invalid_spec, "generate_iv_for: noise drives IV non-positive at cell " + std::to_string(i));
        }
    }
    return iv;
}

/// A synthetic implied-volatility index cointegrated with the index's
/// forward realized volatility over `horizon`.
struct IvSpec {
    std::string name = "iv";
    HorizonSpec horizon = HorizonSpec::monthly();
    double slope = 0.86;
    GeneratorSpec noise{GaussianIid{1.0}, 0, 0, 1};
};

struct MarketSpec {
    GeneratorSpec returns{GjrGarch{}, 5000, 0, 0};
    Date start = kDefaultStartDate;
    double start_level = 1000.0;
    std::size_t annualization_days = kDefaultAnnualizationDays;
    std::vector<IvSpec> iv{IvSpec{}};
};

struct Market {
    PriceSeries index;
    ReturnSeries returns;
    std::vector<PriceSeries> iv;
};

/**
 * Index closes from the return process plus one daily IV series per IvSpec.
 * Day d's IV inverts the cointegration relation against the realized
 * volatility of days d+1..d+W; the last W days, which lack a full forward
 * window, reuse the final available forward volatility. Noise streams are
 * taken from each IvSpec's own (seed, stream), with the seed defaulting to
 * the returns seed.
 */
inline Market generate_market(const MarketSpec& spec) {
    if (!is_return_process(spec.returns.process)) {
        fail(ErrorKind::invalid_spec, "market returns need an iid or GARCH process, got " +
                                          process_name(spec.returns.process));
    }
    if (!(spec.start_level > 0.0)) fail(ErrorKind::invalid_spec, "start_level must be positive");
    Market m;
    const auto dates = business_days(spec.start, spec.returns.n + 1);
    const auto draws = generate_series(spec.returns);
    m.returns.name = "index";
    for (std::size_t i = 0; i < draws.size(); ++i) m.returns.points.push_back({dates[i + 1], draws[i]});
    m.index = prices_from_returns(m.returns, dates[0], spec.start_level);
    m.index.name = "index";

    for (const auto& ivs : spec.iv) {
        ivs.horizon.validate();
        const std::size_t W = ivs.horizon.window_days;
        const std::size_t n = draws.size();
        if (n < W) fail(ErrorKind::invalid_spec, "market too short for IV horizon " + std::to_string(W));
        std::vector<double> rv_fwd(n + 1);
        for (std::size_t d = 0; d <= n; ++d) {
            const std::size_t start = std::min(d, n - W);
            rv_fwd[d] = realized_vol(draws, start, ivs.horizon, spec.annualization_days);
        }
        auto noise = ivs.noise;
        if (noise.seed == 0) noise.seed = spec.returns.seed;
        const auto iv = generate_iv_for(rv_fwd, ivs.slope, noise);
        PriceSeries s{ivs.name, {}};
        s.points.reserve(iv.size());
        for (std::size_t d = 0; d <= n; ++d) s.points.push_back({dates[d], iv[d]});
        m.iv.push_back(std::move(s));
    }
    return m;
}

}  // namespace asymvol::synth
