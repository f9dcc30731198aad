#include <gtest/gtest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" RW_CLI_PATH "' " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string data(const std::string& name) { return "'" RW_DATA_DIR "/" + name + "'"; }

}  // namespace

TEST(Cli, RankOfTableOne) {
    const auto r = run("rank --data " + data("table1.json"));
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["lower"], 3);
    EXPECT_EQ(j["upper"], 3);
    EXPECT_EQ(j["exact"], true);
    EXPECT_EQ(run("rank --matrix " + data("table1.csv")).code, 0);
}

TEST(Cli, WitnessExitCodes) {
    EXPECT_EQ(run("witness --graph " + data("fig2a.json") + " --data " + data("table1.json")).code, 3);
    EXPECT_EQ(run("witness --graph " + data("fig2a_u3.json") + " --data " + data("table1.json")).code, 0);
    EXPECT_EQ(run("witness --graph " + data("fig2c.json") + " --data " + data("fig2c_data.json")).code, 3);
    EXPECT_EQ(run("witness --cardinality 2 --data " + data("table1.json")).code, 3);

    const auto r = run("witness --graph " + data("fig2a.json") + " --data " + data("table1.json"));
    EXPECT_EQ(json::parse(r.out)["status"], "Refuted");
}

TEST(Cli, InconclusiveExitCode) {
    // Rank-2 matrix; with the search disabled the interval is [2, 4], which straddles 3.
    const std::string path = ::testing::TempDir() + "rank2.csv";
    FILE* f = std::fopen(path.c_str(), "w");
    ASSERT_NE(f, nullptr);
    std::fputs("5/60,3/60,4/60,3/60\n4/60,3/60,5/60,3/60\n3/60,2/60,3/60,2/60\n5/60,4/60,7/60,4/60\n", f);
    std::fclose(f);
    EXPECT_EQ(run("--restarts 0 witness --cardinality 3 --data '" + path + "'").code, 4);
    EXPECT_EQ(run("witness --cardinality 3 --data '" + path + "'").code, 0);
    EXPECT_EQ(run("witness --cardinality 1 --data '" + path + "'").code, 3);
}

TEST(Cli, UsageAndInputErrors) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("rank").code, 2);
    EXPECT_EQ(run("--restarts -4 rank --data " + data("table1.json")).code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("rank --data /nonexistent/file.json").code, 5);
    EXPECT_EQ(run("dsep --graph " + data("fig1a.json") + " --x X --y Nope").code, 5);
    EXPECT_EQ(run("rank --data " + data("fig1a.json")).code, 5);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, SeedFromEnvironment) {
    const std::string args = "rank --data " + data("table1.json");
    EXPECT_EQ(run(args, "RANKWITNESS_SEED=7").code, 0);
    EXPECT_EQ(run(args, "RANKWITNESS_SEED=banana").code, 2);
}

TEST(Cli, DeterministicOutput) {
    // Float input forces the factorization search.
    const std::string args = "--format json rank --matrix " + data("table1.csv") + " --tol 1e-9";
    const auto a = run("--arith float --seed 5 " + args);
    const auto b = run("--arith float --seed 5 " + args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    const auto c = run("--arith float " + args, "RANKWITNESS_SEED=5");
    EXPECT_EQ(a.out, c.out);
}

TEST(Cli, GraphCommands) {
    auto r = run("dsep --graph " + data("fig1a.json") + " --x X --y Y --z Z");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["d_separated"], true);
    r = run("dsep --graph " + data("fig1a.json") + " --x X --y Y");
    EXPECT_EQ(json::parse(r.out)["d_separated"], false);
    r = run("dsep --graph " + data("fig1a.json") + " --path X,Z,Y --z Z");
    EXPECT_EQ(json::parse(r.out)["blocked"], true);
    r = run("separators --graph " + data("fig1c.json") + " --x X --y Y");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["max_cardinality"], 4);
    r = run("dot --graph " + data("fig1a.json"));
    EXPECT_NE(r.out.find("dashed"), std::string::npos);
}

TEST(Cli, ProtocolCommands) {
    auto r = run("protocol simulate --in " + data("seed_table1.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["type"], "seed");
    r = run("protocol complexity --matrix " + data("table1.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(json::parse(r.out)["rcorr_bits"][0].get<double>(), 1.584962500721156, 1e-12);
    EXPECT_EQ(json::parse(run("complexity --matrix " + data("table1.json")).out), json::parse(r.out));
    r = run("protocol tradeoff --z1 2 --z2 2 --matrix " + data("table1.json"));
    EXPECT_EQ(json::parse(r.out)["holds"], true);
    r = run("protocol tradeoff --z1 1 --z2 2 --matrix " + data("table1.json"));
    EXPECT_EQ(json::parse(r.out)["holds"], false);
}

TEST(Cli, PerfectCorrelationAndOracle) {
    EXPECT_EQ(run("perfect-corr --ex-x 0.5,0.3 --ex-y 0.5,0.3").code, 3);
    EXPECT_EQ(run("perfect-corr --ex-x 1,0.3 --ex-y 1,0.3").code, 0);
    const auto r = run("oracle --target 1,0.3");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["feasible"], true);
    const auto grid = run("oracle --grid 3 --steps 16");
    ASSERT_EQ(grid.code, 0);
    EXPECT_EQ(grid.out.rfind("ex_x_plus,ex_x_minus,feasible\n", 0), 0u);
}

TEST(Cli, TableFormat) {
    const auto r = run("--format table rank --data " + data("table1.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_FALSE(json::accept(r.out));
    EXPECT_NE(r.out.find("upper"), std::string::npos);
}

TEST(Cli, SliceMomentsLatent) {
    auto r = run("slice --data " + data("fig2c_data.json") + " --var Z --value 0");
    ASSERT_EQ(r.code, 0);
    r = run("slice --data " + data("fig2c_data.json") + " --keep Z");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(run("moments --data " + data("table1.json")).code, 5);
}

TEST(Cli, PsdRank) {
    auto r = run("psd-rank --matrix " + data("table1.json"));
    ASSERT_EQ(r.code, 0);
    auto j = json::parse(r.out);
    EXPECT_EQ(j["lower"], 2);
    EXPECT_EQ(j["upper"], 3);
    r = run("psd-rank --matrix " + data("table1.json") + " --search 2");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["upper"], 2);
}
