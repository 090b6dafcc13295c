#pragma once

// Shared fixtures for the test suite: the example polynomials exercised
// throughout, a brute-force grid-sweep oracle for fibre component counts,
// and a one-call pipeline runner.

#include <cstdint>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "curvetree/curvetree.hpp"

namespace testutil {

using namespace curvetree;

inline Polynomial circle() { return parse_polynomial("x^2 + y^2"); }
// sum of squares of two curves tangent at the origin: crescent levels
inline Polynomial banana() { return parse_polynomial("x^2 + (y^2 - x)^2"); }
inline Polynomial bone() { return parse_polynomial("x^16 + (y^2 + x)^2 (y^2 - x)^2"); }
inline Polynomial double_banana() { return parse_polynomial("x^6 + (y^4 + y^2 - x)^2 (y^2 - x)^2"); }
inline Polynomial deformed_branch() {
    return parse_polynomial("x^2 + (x - y^3 - y^2)^2 (x - y^2)^2");
}
inline Polynomial acnode() { return parse_polynomial("y^2 - x^3 + x^2"); }
inline Polynomial snake() { return parse_polynomial("x^2 + (x - y^3)^2"); } // odd tangencies
inline Polynomial nonstar_p3() { return parse_polynomial("x^6 + (y^2 - x)^2"); }

// Independent fibre oracle: flood fill of {f <= eps} from the origin cell on
// a dense cell-center grid, then maximal vertical runs per column.
struct SweepOracle {
    int cols = 0, rows = 0;
    double x0 = 0, y0 = 0, dx = 0, dy = 0;
    std::vector<std::uint8_t> comp;

    double column_x(int c) const { return x0 + (c + 0.5) * dx; }

    int band_count(int c) const {
        int bands = 0;
        bool in = false;
        for (int r = 0; r < rows; ++r) {
            bool cur = comp[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                            static_cast<std::size_t>(c)] != 0;
            if (cur && !in) ++bands;
            in = cur;
        }
        return bands;
    }

    static SweepOracle build(const Polynomial& f, double eps, double radius, int cols = 1024,
                             int rows = 1024) {
        SweepOracle o;
        o.cols = cols;
        o.rows = rows;
        o.x0 = -radius;
        o.y0 = -radius;
        o.dx = 2 * radius / cols;
        o.dy = 2 * radius / rows;
        std::vector<std::uint8_t> inside(static_cast<std::size_t>(cols) * rows, 0);
        for (int r = 0; r < rows; ++r) {
            double y = o.y0 + (r + 0.5) * o.dy;
            for (int c = 0; c < cols; ++c) {
                double x = o.x0 + (c + 0.5) * o.dx;
                if (f.evaluate(x, y) <= eps)
                    inside[static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c)] = 1;
            }
        }
        o.comp.assign(inside.size(), 0);
        int c0 = cols / 2, r0 = rows / 2; // cell containing the origin-ish
        // nudge to an inside cell near the origin if needed
        bool found = false;
        for (int rad = 0; rad < 4 && !found; ++rad) {
            for (int drr = -rad; drr <= rad && !found; ++drr) {
                for (int dcc = -rad; dcc <= rad && !found; ++dcc) {
                    int rr = r0 + drr, cc = c0 + dcc;
                    if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
                    if (inside[static_cast<std::size_t>(rr) * cols + static_cast<std::size_t>(cc)]) {
                        r0 = rr;
                        c0 = cc;
                        found = true;
                    }
                }
            }
        }
        if (!found) return o;
        std::queue<std::pair<int, int>> q;
        q.push({r0, c0});
        o.comp[static_cast<std::size_t>(r0) * cols + static_cast<std::size_t>(c0)] = 1;
        while (!q.empty()) {
            auto [r, c] = q.front();
            q.pop();
            const int drc[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (auto& d : drc) {
                int rr = r + d[0], cc = c + d[1];
                if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
                std::size_t idx = static_cast<std::size_t>(rr) * cols + static_cast<std::size_t>(cc);
                if (inside[idx] && !o.comp[idx]) {
                    o.comp[idx] = 1;
                    q.push({rr, cc});
                }
            }
        }
        return o;
    }
};

// Number of tree edges whose x-span covers the column.
inline int tree_band_count_at(const ReebTree& tree, double x) {
    int bands = 0;
    for (const auto& e : tree.edges) {
        double a = tree.vertex(e[0]).x, b = tree.vertex(e[1]).x;
        if (std::min(a, b) < x && x < std::max(a, b)) ++bands;
    }
    return bands;
}

// Fraction of oracle columns whose band count matches the tree's.
struct OracleMatch {
    int total = 0;
    int matched = 0;
    int mismatched_far_from_critical = 0;
    double fraction() const { return total == 0 ? 1.0 : double(matched) / double(total); }
};

inline OracleMatch compare_tree_with_oracle(const ReebTree& tree, const SweepOracle& oracle,
                                            double tie_tol) {
    OracleMatch m;
    for (int c = 0; c < oracle.cols; ++c) {
        double x = oracle.column_x(c);
        ++m.total;
        if (oracle.band_count(c) == tree_band_count_at(tree, x)) {
            ++m.matched;
            continue;
        }
        bool near_critical = false;
        for (double cx : tree.critical_xs)
            if (std::fabs(x - cx) <= std::max(tie_tol, oracle.dx)) near_critical = true;
        if (!near_critical) ++m.mismatched_far_from_critical;
    }
    return m;
}

struct PipelineRun {
    Neighbourhood nbhd;
    LevelCurve curve;
    std::vector<TangencyPoint> tangencies;
    ReebTree unrooted;
    ReebTree tree; // rooted
};

inline PipelineRun run_pipeline(const Polynomial& f, double eps, TraceConfig cfg = {}) {
    PipelineRun run;
    run.nbhd = good_neighbourhood(f, cfg);
    run.curve = trace_level(f, eps, run.nbhd, cfg);
    run.tangencies = vertical_tangencies(run.curve, f);
    run.unrooted = build_reeb(run.curve, run.tangencies);
    run.tree = root_tree(run.unrooted, run.curve);
    return run;
}

} // namespace testutil
