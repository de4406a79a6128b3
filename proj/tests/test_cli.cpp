#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DIVGA_BENCH_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path fresh(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("divga_cli_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST(Cli, SuccessWritesReport) {
    const auto dir = fresh("ok");
    EXPECT_EQ(run_cli("circle --population 10 --generations 2 --repetitions 2 --out " + dir.string()), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "circle_runs.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "circle_summary.txt"));
}

TEST(Cli, Help) { EXPECT_EQ(run_cli("--help"), 0); }

TEST(Cli, BadArguments) {
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("no-such-experiment"), 2);
    EXPECT_EQ(run_cli("circle --population 1"), 2);
    EXPECT_EQ(run_cli("circle --crossover blend"), 2);
    EXPECT_EQ(run_cli("circle --generations abc"), 2);
    EXPECT_EQ(run_cli("circle --bogus"), 2);
}

TEST(Cli, ExperimentFailure) {
    const auto dir = fresh("fail");
    std::filesystem::create_directories(dir);
    const auto blocker = dir / "not_a_dir";
    std::ofstream(blocker) << "x";
    EXPECT_EQ(run_cli("circle --population 10 --generations 1 --repetitions 1 --out " + blocker.string()), 1);
}
