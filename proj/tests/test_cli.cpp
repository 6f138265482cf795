#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "invbench_cli_test";

int run(const std::string& args, const std::string& stdout_file = "") {
    std::string cmd = std::string(INVBENCH_CLI) + " " + args;
    cmd += stdout_file.empty() ? " >/dev/null" : " >" + (kWork / stdout_file).string();
    cmd += " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("run, analyze and report end to end") {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    write(kWork / "cfg.json", R"({"dims": [5], "budget_fes": 400, "runs": 5, "functions": [1, 2, 3, 4, 5, 6],
        "checkpoints": 8, "algorithms": ["shade", {"id": "shade", "hybrid": true}, "random_search"]})");
    const std::string res = (kWork / "res").string();
    const std::string an = (kWork / "an").string();

    REQUIRE(run("run --config " + (kWork / "cfg.json").string() + " --out " + res) == 0);
    CHECK(fs::exists(kWork / "res" / "results.csv"));
    CHECK(fs::exists(kWork / "res" / "trajectories.json"));
    CHECK(fs::exists(kWork / "res" / "suite_manifest_dim5.json"));

    REQUIRE(run("analyze --in " + res + " --out " + an + " --dim 5 --rope 10") == 0);
    for (const char* name : {"summary_dim5.csv", "friedman_dim5.csv", "cd_dim5.csv", "bayes_dim5.csv",
                             "boxplot_dim5.csv", "convergence_dim5_f1.csv"})
        CHECK(fs::exists(kWork / "an" / name));

    CHECK(run("report --in " + an + " --format csv --table summary", "from_analysis.csv") == 0);
    CHECK(slurp(kWork / "from_analysis.csv") == slurp(kWork / "an" / "summary_dim5.csv"));
    CHECK(run("report --in " + res + " --format md --table cd", "cd.md") == 0);
    CHECK(slurp(kWork / "cd.md").find("| algorithm | mean_rank | groups |") != std::string::npos);
    for (const char* table : {"bayes", "boxplot", "convergence"})
        CHECK(run("report --in " + res + " --format csv --table " + table) == 0);
}

TEST_CASE("exit codes") {
    fs::create_directories(kWork);
    CHECK(run("run --config " + (kWork / "nope.json").string() + " --out " + (kWork / "x").string()) == 3);
    write(kWork / "bad.json", R"({"dims": [1], "algorithms": ["shade"]})");
    CHECK(run("run --config " + (kWork / "bad.json").string() + " --out " + (kWork / "x").string()) == 2);
    write(kWork / "broken.json", "{not json");
    CHECK(run("run --config " + (kWork / "broken.json").string() + " --out " + (kWork / "x").string()) == 2);
    CHECK(run("analyze --in " + (kWork / "empty").string() + " --out " + (kWork / "y").string()) == 3);
    CHECK(run("report --in " + (kWork / "res").string() + " --format xml") == 2);
    CHECK(run("frobnicate") == 2);
}
