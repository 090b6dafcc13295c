#pragma once

#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "curvetree/errors.hpp"
#include "curvetree/neighbourhood.hpp"
#include "curvetree/polar.hpp"
#include "curvetree/reeb.hpp"
#include "curvetree/trace.hpp"

namespace curvetree {

inline constexpr double kEpsilonFloor = 1e-9; // doubles cannot resolve flat examples below this
inline constexpr int kStabilityWindow = 3;    // consecutive equal codes required

struct EpsilonLadder {
    double eps0 = 0;
    double ratio = 0;
    int steps = 0;
    std::vector<double> values; // eps0 * ratio^k, strictly decreasing
};

inline EpsilonLadder epsilon_ladder(double eps0, double ratio, int steps) {
    if (!(eps0 > 0)) throw DegenerateInput("eps0 must be positive");
    if (!(ratio > 0 && ratio < 1)) throw DegenerateInput("ratio must lie in (0, 1)");
    if (steps < 2) throw DegenerateInput("ladder needs at least 2 steps");
    EpsilonLadder ladder{eps0, ratio, steps, {}};
    double v = eps0;
    for (int k = 0; k < steps; ++k, v *= ratio) {
        if (v < kEpsilonFloor)
            throw BelowNumericFloor("ladder value " + std::to_string(v) +
                                    " below the numeric floor " + std::to_string(kEpsilonFloor));
        ladder.values.push_back(v);
    }
    return ladder;
}

struct GeodesicViolation {
    int leaf_id = -1;
    int at_vertex = -1;
};

struct GeodesicReport {
    bool monotone = false;
    std::vector<GeodesicViolation> violations;
};

// Along every root-to-leaf geodesic, preorder classes must strictly increase
// on the positive (right) side and strictly decrease on the negative (left)
// side. A violation is a vertex where the walk turns back.
inline GeodesicReport check_geodesic_monotonicity(const ReebTree& tree) {
    if (!tree.root_id.has_value()) throw Unrooted("geodesic check requires a rooted tree");
    GeodesicReport rep;
    const int root = *tree.root_id;

    std::vector<std::vector<std::pair<int, int>>> adj(tree.vertices.size()); // (neighbour, edge)
    for (std::size_t e = 0; e < tree.edges.size(); ++e) {
        adj[static_cast<std::size_t>(tree.edges[e][0])].push_back(
            {tree.edges[e][1], static_cast<int>(e)});
        adj[static_cast<std::size_t>(tree.edges[e][1])].push_back(
            {tree.edges[e][0], static_cast<int>(e)});
    }

    struct Frame { int vertex, parent, side; };
    std::vector<Frame> stack;
    for (auto [w, e] : adj[static_cast<std::size_t>(root)]) {
        int side = tree.vertex(w).preorder_class >= tree.vertex(root).preorder_class ? +1 : -1;
        stack.push_back({w, root, side});
    }
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        int prev_cls = tree.vertex(fr.parent).preorder_class;
        int cls = tree.vertex(fr.vertex).preorder_class;
        bool ok = fr.side > 0 ? cls > prev_cls : cls < prev_cls;
        if (!ok) rep.violations.push_back({fr.vertex, fr.vertex});
        for (auto [w, e] : adj[static_cast<std::size_t>(fr.vertex)]) {
            if (w == fr.parent) continue;
            stack.push_back({w, fr.vertex, fr.side});
        }
    }
    rep.monotone = rep.violations.empty();
    return rep;
}

struct LevelOutcome {
    double epsilon = 0;
    bool ok = false;
    std::string code;
    std::string error;
};

struct StabilisationResult {
    EpsilonLadder ladder;
    std::vector<LevelOutcome> levels;
    std::optional<int> stable_from; // codes equal from this index to the end
    std::optional<ReebTree> asymptotic_tree;
    bool monotone_geodesics = false;
};

// One full level: trace, tangencies, tree, root, code.
inline std::pair<ReebTree, std::string> analyze_level(const Polynomial& f, double epsilon,
                                                      const Neighbourhood& nbhd,
                                                      const TraceConfig& cfg,
                                                      CodeOptions code_opts = {}) {
    LevelCurve curve = trace_level(f, epsilon, nbhd, cfg);
    auto tangencies = vertical_tangencies(curve, f);
    ReebTree tree = build_reeb(curve, tangencies);
    tree = root_tree(tree, curve);
    std::string code = canonical_code(tree, code_opts);
    return {std::move(tree), std::move(code)};
}

// Runs the pipeline down the ladder (levels in parallel), detects the stable
// suffix of canonical codes, and keeps the tree of the smallest stable level
// as the asymptotic tree.
inline StabilisationResult asymptotic_tree(const Polynomial& f, const EpsilonLadder& ladder,
                                           const TraceConfig& cfg, CodeOptions code_opts = {}) {
    StabilisationResult result;
    result.ladder = ladder;
    Neighbourhood nbhd = good_neighbourhood(f, cfg);

    const int n = static_cast<int>(ladder.values.size());
    result.levels.resize(static_cast<std::size_t>(n));
    std::vector<std::optional<ReebTree>> trees(static_cast<std::size_t>(n));

    std::atomic<int> next{0};
    auto worker = [&] {
        while (true) {
            int k = next.fetch_add(1);
            if (k >= n) break;
            std::size_t ku = static_cast<std::size_t>(k);
            result.levels[ku].epsilon = ladder.values[ku];
            try {
                auto [tree, code] = analyze_level(f, ladder.values[ku], nbhd, cfg, code_opts);
                trees[ku] = std::move(tree);
                result.levels[ku].code = std::move(code);
                result.levels[ku].ok = true;
            } catch (const Error& e) {
                result.levels[ku].error = e.code() + ": " + e.what();
            } catch (const std::exception& e) {
                result.levels[ku].error = std::string("unexpected: ") + e.what();
            }
        }
    };
    int nthreads = std::min(cfg.effective_threads(), n);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Longest all-ok suffix with identical codes.
    int suffix_start = n;
    for (int k = n - 1; k >= 0; --k) {
        std::size_t ku = static_cast<std::size_t>(k);
        if (!result.levels[ku].ok) break;
        if (suffix_start < n &&
            result.levels[ku].code != result.levels[static_cast<std::size_t>(suffix_start)].code)
            break;
        suffix_start = k;
    }
    if (suffix_start < n && n - suffix_start >= kStabilityWindow) {
        result.stable_from = suffix_start;
        result.asymptotic_tree = trees[static_cast<std::size_t>(n - 1)];
        result.monotone_geodesics = check_geodesic_monotonicity(*result.asymptotic_tree).monotone;
    }
    return result;
}

} // namespace curvetree
