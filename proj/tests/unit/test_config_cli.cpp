#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "asymvol/asymvol.hpp"
#include "helpers.hpp"

using namespace asymvol;
using testutil::kind_of;
namespace fs = std::filesystem;

namespace {

RunConfig fixture_config(const std::string& name, const fs::path& out) {
    auto cfg = load_config(testutil::bundled(name));
    cfg.output_dir = out;
    return cfg;
}

int run_cli(const std::string& args, const fs::path& capture = {}) {
    std::string cmd = std::string("\"") + ASYMVOL_CLI + "\" " + args;
    if (!capture.empty()) cmd += " > \"" + capture.string() + "\" 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

class ScopedEnv {
public:
    ScopedEnv(const char* name, const std::string& value) : name_(name) {
        if (const char* old = std::getenv(name)) old_ = old;
        ::setenv(name, value.c_str(), 1);
    }
    ~ScopedEnv() {
        if (old_) {
            ::setenv(name_, old_->c_str(), 1);
        } else {
            ::unsetenv(name_);
        }
    }
    ScopedEnv(const ScopedEnv&) = delete;
    ScopedEnv& operator=(const ScopedEnv&) = delete;

private:
    const char* name_;
    std::optional<std::string> old_;
};

}  // namespace

TEST(Config, JsonRoundTrip) {
    auto cfg = load_config(testutil::bundled("both.config.json"));
    cfg.start_date = parse_date("1996-01-01");
    cfg.tail_mode = TailMode::dummies;
    cfg.seed = 9;
    cfg.output_dir = "/tmp/asymvol-roundtrip";
    cfg.index->schema.delimiter = ';';
    const auto back = config_from_json(to_json(cfg), RunConfig{}, "/");
    EXPECT_EQ(back, cfg);
    EXPECT_EQ(config_hash(back), config_hash(cfg));
    EXPECT_EQ(config_hash(cfg).size(), 64u);
}

TEST(Config, FilePathsResolveAgainstTheFile) {
    const auto cfg = load_config(testutil::bundled("monthly.config.json"));
    EXPECT_EQ(cfg.index->path, fs::absolute(testutil::bundled("index.csv")).lexically_normal());
    EXPECT_FALSE(cfg.iv_short.has_value());
    EXPECT_EQ(cfg.horizons, HorizonSelection::monthly);
    EXPECT_EQ(cfg.classification, Classification::sign);
}

TEST(Config, Validation) {
    auto cfg = load_config(testutil::bundled("monthly.config.json"));
    EXPECT_NO_THROW(validate(cfg));
    auto both = cfg;
    both.horizons = HorizonSelection::both;
    EXPECT_EQ(kind_of([&] { validate(both); }), ErrorKind::invalid_spec);
    auto q = cfg;
    q.lower_q = 0.95;
    EXPECT_EQ(kind_of([&] { validate(q); }), ErrorKind::invalid_spec);
    EXPECT_EQ(kind_of([] { validate(RunConfig{}); }), ErrorKind::invalid_spec);
    EXPECT_EQ(kind_of([] { config_from_json(nlohmann::json{{"colour", "red"}}); }), ErrorKind::parse);
    EXPECT_EQ(kind_of([] { config_from_json(nlohmann::json{{"horizons", "weekly"}}); }), ErrorKind::invalid_spec);
}

TEST(Config, PrecedenceFlagsOverFileOverEnvOverDefaults) {
    testutil::TempDir tmp;
    EXPECT_EQ(RunConfig{}.output_dir, fs::path("asymvol-out"));
    ScopedEnv env(kOutputDirEnv, (tmp / "from_env").string());
    EXPECT_EQ(default_config().output_dir, tmp / "from_env");

    auto file_json = nlohmann::json::parse(testutil::slurp(testutil::bundled("monthly.config.json")));
    file_json["inputs"]["index"]["path"] = testutil::bundled("index.csv").string();
    file_json["inputs"]["iv_monthly"]["path"] = testutil::bundled("iv_monthly.csv").string();
    testutil::spit(tmp / "plain.json", file_json.dump());
    file_json["output_dir"] = (tmp / "from_file").string();
    file_json["bp_lag"] = 3;
    testutil::spit(tmp / "with_dir.json", file_json.dump());

    auto printed = [&](const std::string& args) {
        EXPECT_EQ(run_cli("pipeline --print-config " + args, tmp / "out.txt"), 0);
        return nlohmann::json::parse(testutil::slurp(tmp / "out.txt"));
    };
    EXPECT_EQ(printed("-c \"" + (tmp / "plain.json").string() + "\"")["output_dir"], (tmp / "from_env").string());
    const auto file = printed("-c \"" + (tmp / "with_dir.json").string() + "\"");
    EXPECT_EQ(file["output_dir"], (tmp / "from_file").string());
    EXPECT_EQ(file["bp_lag"], 3);
    const auto flag = printed("-c \"" + (tmp / "with_dir.json").string() + "\" --bp-lag 2 -o \"" +
                              (tmp / "from_flag").string() + "\"");
    EXPECT_EQ(flag["output_dir"], (tmp / "from_flag").string());
    EXPECT_EQ(flag["bp_lag"], 2);
}

TEST(Pipeline, MonthlySignRunWritesItsArtifacts) {
    testutil::TempDir tmp;
    std::ostringstream diag;
    const auto res = run_pipeline(fixture_config("monthly.config.json", tmp.path()), diag);
    ASSERT_TRUE(res.ok()) << diag.str();
    EXPECT_EQ(res.manifest->outputs,
              (std::vector<std::string>{"figures/fig1.csv", "figures/fig4_fall.csv", "figures/fig4_jump.csv",
                                        "figures/fig5_fall.csv", "figures/fig5_jump.csv", "grids/monthly.csv",
                                        "manifest.json", "run.log", "tables/table1.csv", "tables/table1.json",
                                        "tables/table4.csv", "tables/table4.json"}));
    EXPECT_EQ(files_under(tmp.path()), res.manifest->outputs);
    const auto t1 = testutil::slurp(tmp / "tables/table1.csv");
    EXPECT_NE(t1.find(",NA,"), std::string::npos);
    EXPECT_EQ(res.manifest->input_digests.size(), 2u);
    EXPECT_EQ(res.manifest->input_digests.at("index"), detail::sha256_file(testutil::bundled("index.csv")));
}

TEST(Pipeline, BothHorizonsAndClassificationsCoverEveryArtifact) {
    testutil::TempDir tmp;
    std::ostringstream diag;
    const auto res = run_pipeline(fixture_config("both.config.json", tmp.path()), diag);
    ASSERT_TRUE(res.ok()) << diag.str();
    const auto& out = res.manifest->outputs;
    auto has = [&](const std::string& f) { return std::find(out.begin(), out.end(), f) != out.end(); };
    for (int t = 1; t <= 5; ++t) {
        EXPECT_TRUE(has("tables/table" + std::to_string(t) + ".csv")) << t;
        EXPECT_TRUE(has("tables/table" + std::to_string(t) + ".json")) << t;
    }
    EXPECT_TRUE(has("figures/fig1.csv"));
    for (int f = 2; f <= 7; ++f) {
        EXPECT_TRUE(has(figure_path(f, ShockLabel::fall)) || has(figure_path(f, ShockLabel::jump))) << f;
    }
    EXPECT_TRUE(has("grids/short.csv"));
    const auto t1 = testutil::slurp(tmp / "tables/table1.csv");
    EXPECT_EQ(t1.find("NA"), std::string::npos);
}

TEST(Pipeline, RerunIsByteIdentical) {
    testutil::TempDir tmp;
    std::ostringstream diag;
    const auto cfg = fixture_config("monthly.config.json", tmp.path());
    const auto first = run_pipeline(cfg, diag);
    ASSERT_TRUE(first.ok());
    std::map<std::string, std::string> bytes;
    for (const auto& f : first.manifest->outputs) bytes[f] = testutil::slurp(tmp / f);
    const auto second = run_pipeline(cfg, diag);
    ASSERT_TRUE(second.ok());
    EXPECT_EQ(*first.manifest, *second.manifest);
    for (const auto& [f, b] : bytes) EXPECT_EQ(testutil::slurp(tmp / f), b) << f;
}

TEST(Pipeline, MissingIvFailsInIngest) {
    testutil::TempDir tmp;
    auto cfg = fixture_config("monthly.config.json", tmp / "out");
    cfg.iv_monthly->path = tmp / "absent.csv";
    std::ostringstream diag;
    const auto res = run_pipeline(cfg, diag);
    EXPECT_EQ(res.exit_code, 3);
    EXPECT_EQ(res.failed_stage, Stage::ingest);
    EXPECT_NE(diag.str().find("ingest stage failed"), std::string::npos) << diag.str();
    EXPECT_NE(diag.str().find("absent.csv"), std::string::npos);
    EXPECT_FALSE(fs::exists(tmp / "out" / "manifest.json"));
}

TEST(Pipeline, ConfigErrorsExitTwo) {
    testutil::TempDir tmp;
    RunConfig cfg;
    cfg.output_dir = tmp.path();
    std::ostringstream diag;
    EXPECT_EQ(run_pipeline(cfg, diag).exit_code, 2);
}

TEST(Pipeline, UnrelatedFilesInOutputDirAreNotClobbered) {
    testutil::TempDir tmp;
    testutil::spit(tmp / "notes.txt", "keep");
    std::ostringstream diag;
    const auto res = run_pipeline(fixture_config("monthly.config.json", tmp.path()), diag);
    EXPECT_EQ(res.exit_code, 5);
    EXPECT_EQ(testutil::slurp(tmp / "notes.txt"), "keep");
}

TEST(Cli, Version) {
    testutil::TempDir tmp;
    EXPECT_EQ(run_cli("version", tmp / "v.txt"), 0);
    EXPECT_EQ(testutil::slurp(tmp / "v.txt"), std::string("asymvol ") + kVersion + "\n");
}

TEST(Cli, SynthIsSeedDeterministic) {
    testutil::TempDir tmp;
    const auto spec = testutil::bundled("market.synth.json").string();
    ASSERT_EQ(run_cli("synth \"" + spec + "\" -o \"" + (tmp / "a").string() + "\"", tmp / "log.txt"), 0);
    ASSERT_EQ(run_cli("synth \"" + spec + "\" -o \"" + (tmp / "b").string() + "\"", tmp / "log.txt"), 0);
    for (const char* f : {"index.csv", "returns.csv", "iv_monthly.csv", "iv_short.csv"}) {
        EXPECT_EQ(testutil::slurp(tmp / "a" / f), testutil::slurp(tmp / "b" / f)) << f;
    }
    // The bundled fixtures were produced by this spec.
    EXPECT_EQ(testutil::slurp(tmp / "a" / "index.csv"), testutil::slurp(testutil::bundled("index.csv")));
    EXPECT_EQ(testutil::slurp(tmp / "a" / "iv_short.csv"), testutil::slurp(testutil::bundled("iv_short.csv")));
}

TEST(Cli, SynthRejectsExplosiveGarch) {
    testutil::TempDir tmp;
    testutil::spit(tmp / "bad.json",
                   R"({"seed": 1, "n": 100, "returns": {"kind": "garch11", "omega": 1e-6, "alpha": 0.2, "beta": 0.8}})");
    EXPECT_EQ(run_cli("synth \"" + (tmp / "bad.json").string() + "\" -o \"" + (tmp / "o").string() + "\"",
                      tmp / "log.txt"),
              2);
    EXPECT_NE(testutil::slurp(tmp / "log.txt").find("alpha + beta < 1"), std::string::npos);
}

TEST(Cli, PipelineExitCodes) {
    testutil::TempDir tmp;
    const auto cfg = testutil::bundled("monthly.config.json").string();
    EXPECT_EQ(run_cli("pipeline -c \"" + cfg + "\" -o \"" + (tmp / "ok").string() + "\"", tmp / "log.txt"), 0);
    EXPECT_TRUE(fs::exists(tmp / "ok" / "manifest.json"));
    EXPECT_EQ(run_cli("pipeline -c \"" + cfg + "\" --iv-monthly \"" + (tmp / "none.csv").string() + "\" -o \"" +
                          (tmp / "bad").string() + "\"",
                      tmp / "log.txt"),
              3);
    EXPECT_NE(testutil::slurp(tmp / "log.txt").find("ingest"), std::string::npos);
    EXPECT_EQ(run_cli("pipeline -c \"" + cfg + "\" --horizons weekly", tmp / "log.txt"), 2);
}

TEST(Cli, CalibrateWritesSummary) {
    testutil::TempDir tmp;
    const auto out = tmp / "cal.json";
    EXPECT_EQ(run_cli("calibrate --suite adf --trials 2000 --seed 3 --output \"" + out.string() + "\"", tmp / "log.txt"),
              0)
        << testutil::slurp(tmp / "log.txt");
    const auto j = nlohmann::json::parse(testutil::slurp(out));
    EXPECT_EQ(j["trials"], 2000);
    EXPECT_NE(run_cli("calibrate --suite adf --trials 5", tmp / "log.txt"), 0);
}
