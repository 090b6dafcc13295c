#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "curvetree/json_io.hpp"
#include "curvetree/svg.hpp"
#include "support.hpp"

using namespace curvetree;
using namespace testutil;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_occurrences(const std::string& hay, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = hay.find(needle); pos != std::string::npos;
         pos = hay.find(needle, pos + needle.size()))
        ++n;
    return n;
}

} // namespace

TEST_CASE("tree JSON round-trips structurally") {
    for (auto& [f, eps] : std::vector<std::pair<Polynomial, double>>{
             {circle(), 0.04}, {banana(), 0.1}, {snake(), 0.01}}) {
        auto run = run_pipeline(f, eps);
        json j = tree_to_json(run.tree);
        ReebTree back = tree_from_json(j);
        back.tie_tol = run.tree.tie_tol;
        CHECK(tree_structurally_equal(run.tree, back));
        // codes recomputed from the parsed tree agree
        CHECK(canonical_code(back) == canonical_code(run.tree));
        // and a second serialisation is byte-identical
        CHECK(tree_to_json(back).dump() == j.dump());
    }
}

TEST_CASE("tree JSON schema shape") {
    auto run = run_pipeline(circle(), 0.04);
    json j = tree_to_json(run.tree);
    REQUIRE(j.contains("vertices"));
    REQUIRE(j.contains("edges"));
    REQUIRE(j.contains("embedding"));
    REQUIRE(j.contains("root"));
    for (const auto& v : j["vertices"]) {
        CHECK(v.contains("id"));
        CHECK(v.contains("x"));
        CHECK(v.contains("kind"));
        CHECK(v.contains("preorder_class"));
    }
    CHECK(j["edges"].size() == run.tree.edges.size());
    CHECK(!j["root"].is_null());
}

TEST_CASE("golden canonical codes") {
    CHECK(canonical_code(run_pipeline(circle(), 0.04).tree) == "R(L[1])(R[1])");
    CHECK(canonical_code(run_pipeline(banana(), 0.1).tree) == "R(L[1])(R[1](R[2])(R[2]))");
    CHECK(canonical_code(run_pipeline(bone(), 1e-4).tree) ==
          "R(L[1](L[2])(L[2]))(R[1](R[2])(R[2]))");
    // nested splits with tied tips on each side
    CHECK(canonical_code(run_pipeline(double_banana(), 1e-3).tree) ==
          "R(L[1])(R[1](R[2](R[3])(R[3]))(R[2](R[3])(R[3])))");
}

TEST_CASE("reports serialize with stable shapes") {
    auto run = run_pipeline(banana(), 0.1);
    json conv = convexity_to_json(convexity_defect(run.curve, run.unrooted));
    CHECK(conv["is_convex"] == false);
    CHECK(conv["witness"].is_object());
    json star = star_to_json(star_kernel(run.curve));
    CHECK(star["is_star"] == true);
    json jr = jordan_to_json(verify_jordan(run.curve));
    CHECK(jr["pass"] == true);
    json stab = stabilisation_to_json(StabilisationResult{});
    CHECK(stab.contains("stable_from"));
}

TEST_CASE("atomic_write replaces files whole") {
    std::string path = "atomic_test.tmp.json";
    atomic_write(path, "{\"a\":1}\n");
    CHECK(slurp(path) == "{\"a\":1}\n");
    atomic_write(path, "{\"a\":2}\n");
    CHECK(slurp(path) == "{\"a\":2}\n");
    std::remove(path.c_str());
}

TEST_CASE("identical inputs produce byte-identical JSON") {
    auto a = run_pipeline(banana(), 0.1);
    auto b = run_pipeline(banana(), 0.1);
    CHECK(tree_to_json(a.tree).dump(2) == tree_to_json(b.tree).dump(2));
}

TEST_CASE("SVG output contains the expected elements") {
    TraceConfig cfg;
    auto run = run_pipeline(banana(), 0.1, cfg);
    auto branches = polar_half_branches(banana(), run.nbhd, cfg);
    std::string path = "svg_test.tmp.svg";
    render_svg(run.curve, branches, run.tree, path);
    std::string svg = slurp(path);
    std::remove(path.c_str());

    CHECK(count_occurrences(svg, "<svg") == 1);
    CHECK(count_occurrences(svg, "class=\"curve\"") == 1);
    CHECK(count_occurrences(svg, "class=\"polar\"") == 4);
    CHECK(count_occurrences(svg, "class=\"tree-edge\"") == static_cast<int>(run.tree.edges.size()));
    CHECK(count_occurrences(svg, "<circle") == static_cast<int>(run.tree.vertices.size()));
    CHECK(count_occurrences(svg, "class=\"root\"") == 1);
    CHECK(svg.find("scale(1,-1)") != std::string::npos);
    CHECK(svg.find("viewBox=\"-1 -1 2 2\"") != std::string::npos);
}

TEST_CASE("rendering an empty tree is an error") {
    auto run = run_pipeline(circle(), 0.04);
    ReebTree empty;
    CHECK_THROWS_AS(render_svg(run.curve, {}, empty, "unused.svg"), EmptyInput);
    LevelCurve no_curve;
    CHECK_THROWS_AS(render_svg(no_curve, {}, run.tree, "unused.svg"), EmptyInput);
}
