#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "quenchlab/runner.hpp"

using namespace quenchlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("quenchlab_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Config, Defaults)
{
    ExperimentConfig c;
    EXPECT_EQ(c.n_sites, 200);
    EXPECT_DOUBLE_EQ(c.h_initial, -30.0);
    EXPECT_DOUBLE_EQ(c.resolved_h_final(), 30.0);
    c.pair = "nn";
    EXPECT_DOUBLE_EQ(c.resolved_h_final(), 5.0);
    c.h_final = 7.0;
    EXPECT_DOUBLE_EQ(c.resolved_h_final(), 7.0);
}

TEST(Config, ValidationRejectsBadInput)
{
    ExperimentConfig c;
    c.n_sites = 7;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.kind = "nope";
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.noise = "pink";
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.kind = "sweep-tau";
    c.tau_grid = "1:10";
    EXPECT_THROW(validate(c), ConfigError);
    c.tau_grid = "1:10:x";
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.kind = "sweep-tau";
    c.noise = "ou";
    c.tau_n = 1.0;
    EXPECT_THROW(validate(c), ConfigError);  // ou goes through trajectories, quench only
    c = {};
    c.noise = "ou";
    EXPECT_THROW(validate(c), ConfigError);  // needs tau_n
    c = {};
    c.kind = "oracle-check";
    EXPECT_THROW(validate(c), ConfigError);  // N = 200 is beyond ED
    c.n_sites = 8;
    EXPECT_NO_THROW(validate(c));
    c = {};
    c.method = "euler";
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.kind = "fit";
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Config, ValueLists)
{
    EXPECT_EQ(parse_value_list("0.002,0.004", "xi").size(), 2u);
    EXPECT_EQ(parse_value_list("1:100:10", "xi").size(), 21u);
    EXPECT_THROW(parse_value_list("0.1,,", "xi"), ConfigError);
}

TEST(Config, HashIgnoresThreadsAndOutput)
{
    ExperimentConfig a, b;
    b.threads = 7;
    b.out = "/elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.tau = 11.0;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(stable_hash(""), "cbf29ce484222325");
}

TEST(Io, CsvRoundTripIsLossless)
{
    CsvTable t;
    t.columns = {"a", "b"};
    t.add({0.1, 1.0 / 3.0});
    t.add({-1e-300, 6.02214076e23});
    EXPECT_THROW(t.add({1.0}), ConfigError);
    const auto dir = scratch("csv");
    write_text(dir / "t.csv", render_csv(t, {{"manifest_hash", "x"}}));
    nlohmann::json header;
    const auto back = read_csv(dir / "t.csv", &header);
    EXPECT_EQ(header["manifest_hash"], "x");
    ASSERT_EQ(back.rows.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            EXPECT_EQ(back.rows[i][j], t.rows[i][j]);
        }
    }
    EXPECT_EQ(column(back, "b")[0], 1.0 / 3.0);
    EXPECT_THROW(column(back, "c"), ConfigError);
}

TEST(Runner, SweepBytesIndependentOfWorkers)
{
    ExperimentConfig c;
    c.kind = "sweep-tau";
    c.n_sites = 40;
    c.h_initial = -5.0;
    c.h_final = 5.0;
    c.tau_grid = "1:20:4";
    c.xi = 0.01;
    c.out = scratch("sweep1").string();
    run(c, 1);
    const auto one = slurp(fs::path(c.out) / "sweep_tau.csv");
    c.out = scratch("sweep3").string();
    run(c, 3);
    const auto three = slurp(fs::path(c.out) / "sweep_tau.csv");
    EXPECT_EQ(one, three);
    EXPECT_NE(one.find(config_hash(c)), std::string::npos);
    EXPECT_EQ(one.substr(0, 2), "# ");

    const auto manifest = nlohmann::json::parse(slurp(manifest_path(c)));
    EXPECT_EQ(manifest["manifest_hash"], config_hash(c));
    EXPECT_EQ(manifest["status"], "ok");
    EXPECT_EQ(manifest["config"]["n"], 40);
    EXPECT_TRUE(manifest.contains("wall_time_s"));
    EXPECT_TRUE(manifest.contains("clamp_count"));
}

TEST(Runner, HfScanColumnsAndFit)
{
    ExperimentConfig c;
    c.kind = "quench";
    c.n_sites = 20;
    c.h_initial = -3.0;
    c.h_final = 3.0;
    c.tau = 2.0;
    c.hf_scan = true;
    c.points = 13;
    c.out = scratch("scan").string();
    const auto out = run(c, 2);
    const auto& t = out.tables.at("quench");
    EXPECT_EQ(t.columns[0], "h0");
    EXPECT_EQ(t.columns[1], "C_nn");
    EXPECT_EQ(t.columns[2], "C_nnn");
    ASSERT_EQ(t.rows.size(), 13u);
    EXPECT_DOUBLE_EQ(t.rows.front()[0], -3.0);
    EXPECT_DOUBLE_EQ(t.rows.back()[0], 3.0);

    ExperimentConfig f;
    f.kind = "fit";
    f.input = (fs::path(c.out) / "quench.csv").string();
    f.x_column = "h0";
    f.y_column = "sz";
    f.model = "linear";
    f.out = c.out;
    const auto fit = run(f, 1);
    EXPECT_TRUE(fs::exists(fs::path(c.out) / "fit.json"));
    EXPECT_EQ(fit.results["fit"]["model"], "linear");
    EXPECT_EQ(fit.results["fit"]["inputs_hash"].get<std::string>().size(), 16u);
}

TEST(Runner, OracleCheckPasses)
{
    ExperimentConfig c;
    c.kind = "oracle-check";
    c.n_sites = 6;
    c.out = scratch("oracle").string();
    const auto out = run(c, 1);
    EXPECT_TRUE(out.passed);
    EXPECT_EQ(out.tables.at("oracle_check").rows.size(), (5u + 4u) * 3u);
}
