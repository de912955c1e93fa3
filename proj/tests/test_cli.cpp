#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const fs::path kConfigs = EHWSN_CONFIG_DIR;

struct Outcome {
    int code = -1;
    std::string err;
};

/// Runs the CLI with `args`, capturing stderr.
Outcome cli(const std::string& args) {
    const fs::path err = fs::temp_directory_path() / ("ehwsn_cli_err_" + std::to_string(::getpid()));
    const std::string cmd = std::string(EHWSN_CLI) + " " + args + " > /dev/null 2> " + err.string();
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err);
    std::ostringstream os;
    os << in.rdbuf();
    r.err = os.str();
    fs::remove(err);
    return r;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string config(const std::string& name) { return "--config " + (kConfigs / name).string(); }

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("ehwsn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    fs::path dir;
};

TEST_F(Cli, SolveSaveAndCheck) {
    const fs::path saved = dir / "s.json";
    EXPECT_EQ(cli("solve " + config("reference_slot.json") + " --channel oc --save " + saved.string()).code, 0);
    ASSERT_TRUE(fs::exists(saved));
    EXPECT_EQ(cli("check --solution " + saved.string()).code, 0);
    const Outcome strict = cli("check --solution " + saved.string() + " --kkt-tol 1e-300");
    EXPECT_EQ(strict.code, 9);
    EXPECT_NE(strict.err.find("error[kkt]"), std::string::npos);
}

TEST_F(Cli, RoundCsvIsDeterministic) {
    const std::string base = "round " + config("tree15.json") + " --seed-gains 5 --seed-flows 6";
    ASSERT_EQ(cli(base + " --seed-energy 7 --out " + (dir / "a.csv").string()).code, 0);
    ASSERT_EQ(cli(base + " --seed-energy 7 --out " + (dir / "b.csv").string()).code, 0);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    EXPECT_EQ(slurp(dir / "a_summary.csv"), slurp(dir / "b_summary.csv"));
    ASSERT_EQ(cli(base + " --seed-energy 8 --out " + (dir / "c.csv").string()).code, 0);
    EXPECT_NE(slurp(dir / "a.csv"), slurp(dir / "c.csv"));
}

TEST_F(Cli, SlotsFlagSetsSummaryLength) {
    ASSERT_EQ(cli("round " + config("chain.json") + " --slots 3 --transfer off --out " + (dir / "r.csv").string()).code, 0);
    const std::string summary = slurp(dir / "r_summary.csv");
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 4);
}

TEST_F(Cli, OracleWritesOneRow) {
    const fs::path out = dir / "o.csv";
    ASSERT_EQ(cli("oracle " + config("chain.json") + " --slot 2 --grid 8 --out " + out.string()).code, 0);
    const std::string text = slurp(out);
    EXPECT_EQ(text.rfind("value,p_", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST_F(Cli, ErrorCategories) {
    EXPECT_EQ(cli("").code, 1);
    EXPECT_EQ(cli("solve " + config("chain.json") + " --channel tdma").code, 1);
    EXPECT_EQ(cli("solve --config " + (dir / "missing.json").string()).code, 1);

    std::ofstream(dir / "broken.json") << "{\"schema_version\": 1";
    const Outcome broken = cli("solve --config " + (dir / "broken.json").string());
    EXPECT_EQ(broken.code, 3);
    EXPECT_NE(broken.err.find("error[config]"), std::string::npos);

    EXPECT_EQ(cli("solve " + config("chain.json") + " --slot 9").code, 3);
    EXPECT_EQ(cli("oracle " + config("reference_slot.json")).code, 2);
    EXPECT_EQ(cli("round " + config("chain.json") + " --out /nonexistent/dir/x.csv").code, 8);

    std::string starved = slurp(kConfigs / "reference_slot.json");
    starved.replace(starved.find("\"1\": 9"), 6, "\"1\": 1e-9");
    std::ofstream(dir / "starved.json") << starved;
    const Outcome infeasible = cli("solve --config " + (dir / "starved.json").string() + " --transfer off");
    EXPECT_EQ(infeasible.code, 6);
    EXPECT_NE(infeasible.err.find("error[energy_infeasible]"), std::string::npos);
}

}  // namespace
