#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string cli = CURVETREE_CLI_PATH;

int run(const std::string& args) {
    std::string cmd = cli + " " + args + " >cli_stdout.tmp 2>cli_stderr.tmp";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

nlohmann::json load(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("analyze: the banana example is non-convex") {
    TempDir dir("cli_banana");
    int rc = run("analyze --poly \"x^2 + (y^2 - x)^2\" --eps 0.1 --out " + dir.path.string());
    CHECK(rc == 0);
    auto report = load(dir.path / "report.json");
    CHECK(report["convexity"]["is_convex"] == false);
    CHECK(report["minimum_class"] == "degenerate");
    CHECK(report["canonical_code"] == "R(L[1])(R[1](R[2])(R[2]))");
    auto tree = load(dir.path / "tree.json");
    CHECK(tree["vertices"].size() == 5);
    auto manifest = load(dir.path / "manifest.json");
    CHECK(manifest["command"] == "analyze");
    CHECK(manifest["poly_text"] == "x^2 + (y^2 - x)^2");
    CHECK(manifest["outputs"].size() == 2);
}

TEST_CASE("analyze: the circle is convex") {
    TempDir dir("cli_circle");
    int rc = run("analyze --poly \"x^2 + y^2\" --eps 0.04 --out " + dir.path.string());
    CHECK(rc == 0);
    auto report = load(dir.path / "report.json");
    CHECK(report["convexity"]["is_convex"] == true);
    CHECK(report["minimum_class"] == "morse_convex");
}

TEST_CASE("usage errors exit 1") {
    TempDir dir("cli_usage");
    CHECK(run("analyze --poly \"x^2 +\" --eps 0.1 --out " + dir.path.string()) == 1);
    CHECK(run("stabilize --poly \"x^2 + y^2\" --ratio 1.5 --out " + dir.path.string()) == 1);
    CHECK(run("analyze") == 1);
    CHECK(run("") == 1);
    CHECK(run("frobnicate --poly x") == 1);
}

TEST_CASE("geometry errors exit 2") {
    TempDir dir("cli_geom");
    CHECK(run("analyze --poly \"x^2 + (y^2 - x)^2\" --eps 10 --out " + dir.path.string()) == 2);
    CHECK(run("analyze --poly \"x^2 - y^2\" --eps 0.1 --out " + dir.path.string()) == 2);
}

TEST_CASE("stabilize writes the ladder result") {
    TempDir dir("cli_stab");
    int rc = run("stabilize --poly \"x^2 + (y^2 - x)^2\" --eps-start 0.1 --ratio 0.5 --steps 8 "
                 "--out " + dir.path.string());
    CHECK(rc == 0);
    auto stab = load(dir.path / "stabilisation.json");
    CHECK(stab["stable_from"] == 0);
    CHECK(stab["monotone_geodesics"] == true);
    CHECK(stab["levels"].size() == 8);
    CHECK(stab["asymptotic_tree"]["vertices"].size() == 5);
}

TEST_CASE("render, polar and kernel commands") {
    TempDir dir("cli_misc");
    CHECK(run("render --poly \"x^2 + (y^2 - x)^2\" --eps 0.1 --out " + dir.path.string()) == 0);
    CHECK(fs::exists(dir.path / "figure.svg"));

    CHECK(run("polar --poly \"x^2 + (y^2 - x)^2\" --out " + dir.path.string()) == 0);
    auto polar = load(dir.path / "polar.json");
    CHECK(polar["half_branches"].size() == 4);
    CHECK(polar["divisible_by_x"] == false);

    CHECK(run("kernel --poly \"x^6 + (y^2 - x)^2\" --eps 0.0001 --out " + dir.path.string()) == 0);
    auto kernel = load(dir.path / "kernel.json");
    CHECK(kernel["star"]["is_star"] == false);
}

TEST_CASE("analyze honours --config and --grid") {
    TempDir dir("cli_cfg");
    {
        std::ofstream cfg(dir.path / "trace.cfg");
        cfg << "grid_n = 256\nnbhd_candidates = 0.5\n";
    }
    int rc = run("analyze --poly \"x^2 + y^2\" --eps 0.01 --config " +
                 (dir.path / "trace.cfg").string() + " --out " + dir.path.string());
    CHECK(rc == 0);
    auto manifest = load(dir.path / "manifest.json");
    CHECK(manifest["config"]["grid_n"] == 256);
    CHECK(manifest["config"]["nbhd_candidates"].size() == 1);
}

TEST_CASE("reruns produce byte-identical JSON") {
    TempDir dir("cli_repro");
    std::string args = "analyze --poly \"x^2 + (y^2 - x)^2\" --eps 0.1 --out " + dir.path.string();
    REQUIRE(run(args) == 0);
    std::ifstream in1(dir.path / "tree.json");
    std::stringstream s1;
    s1 << in1.rdbuf();
    in1.close();
    REQUIRE(run(args) == 0);
    std::ifstream in2(dir.path / "tree.json");
    std::stringstream s2;
    s2 << in2.rdbuf();
    CHECK(s1.str() == s2.str());
}

TEST_CASE("CURVETREE_THREADS caps stabilize parallelism") {
    TempDir dir("cli_threads");
    std::string cmd = "CURVETREE_THREADS=1 " + cli +
                      " stabilize --poly \"x^2 + y^2\" --eps-start 0.1 --ratio 0.5 --steps 4 "
                      "--out " + dir.path.string() + " >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    auto stab = load(dir.path / "stabilisation.json");
    CHECK(stab["stable_from"] == 0);
}
