#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "curvetree/config.hpp"
#include "curvetree/errors.hpp"
#include "curvetree/geometry.hpp"
#include "curvetree/polynomial.hpp"

namespace curvetree {

// Which of the good-neighbourhood conditions were verified, and how densely.
struct NeighbourhoodChecks {
    bool only_minimum = false;             // (i) f > 0 off the origin on the scan grid
    bool isolated_zero = false;            // (ii) no zero samples off the origin
    bool polar_smooth = false;             // (iii) polar branches meet only at the origin
    bool f_monotone = false;               // (iv) f strictly monotone along half-branches
    bool x_monotone = false;               // (v) x strictly monotone along half-branches
    bool single_boundary_crossing = false; // (vi) each half-branch exits the disk once
    int grid_samples = 0;                  // per-axis density of the positivity scan
    int circle_samples = 0;                // polar seed scan density

    bool all() const {
        return only_minimum && isolated_zero && polar_smooth && f_monotone && x_monotone &&
               single_boundary_crossing;
    }
};

struct PolarBranchCache; // traced polar half-branches, kept as check evidence

// Euclidean disk about the origin together with the verification evidence.
struct Neighbourhood {
    double radius = 0;
    NeighbourhoodChecks checks;
    bool accepted = false;
    std::shared_ptr<const PolarBranchCache> polar_evidence;
};

// Oriented closed polyline approximating the level set f = epsilon around the
// origin, counterclockwise, with per-vertex residuals |f - epsilon|.
struct LevelCurve {
    Polynomial f;
    double epsilon = 0;
    std::vector<Vec2> points;
    std::vector<double> residuals;
    Neighbourhood nbhd;
    int grid_used = 0;
};

struct JordanReport {
    bool closed = false;
    bool simple = false;
    int winding = 0;              // around the origin
    bool counterclockwise = false;
    double max_residual = 0;
    std::optional<std::pair<std::size_t, std::size_t>> crossing;

    bool pass() const { return closed && simple && counterclockwise && winding == 1; }
};

// Newton refinement iteration cap for on-curve projections.
inline constexpr int kNewtonMaxIter = 50;

namespace trace_detail {

// f(p) - eps, escalated to double-double precision whenever the double
// roundoff floor is too coarse for the requested tolerance.
inline double residual_at(const Polynomial& f, double x, double y, double eps, double tol) {
    auto [v, scale] = f.evaluate_with_scale(x, y);
    double noise = (scale + std::fabs(eps)) * 1e-15;
    if (noise <= 0.25 * tol) return v - eps;
    dd r = f.evaluate_dd(x, y) - dd(eps);
    return r.value();
}

struct MarchSegment {
    Vec2 a, b;
    std::uint64_t ea = 0, eb = 0; // global crossing-edge ids
    bool saddle = false;
};

struct MarchResult {
    std::vector<std::vector<Vec2>> loops;
    std::vector<bool> loop_saddle;
    bool open_chains = false;
    bool boundary_inside = false; // some node on the square boundary has f < eps
};

// One pass of marching squares over the bounding square [-r, r]^2, streaming
// node values two rows at a time. Nodes with f < eps count as inside.
inline MarchResult march_squares(const Polynomial& f, double eps, double r, int n) {
    const double step = 2.0 * r / n;
    auto node_x = [&](int i) { return -r + step * i; };

    // Dense rows via Horner in x (coefficients of x^k collected per row).
    int degx = std::max(f.degree_in(Var::x), 0);
    std::vector<double> xcoef(static_cast<std::size_t>(degx) + 1);
    std::vector<double> row_lo(static_cast<std::size_t>(n) + 1), row_hi(row_lo.size());
    auto ipow = [](double b, int e) {
        double v = 1.0;
        while (e > 0) {
            if (e & 1) v *= b;
            b *= b;
            e >>= 1;
        }
        return v;
    };
    auto eval_row = [&](int j, std::vector<double>& out) {
        double y = -r + step * j;
        std::fill(xcoef.begin(), xcoef.end(), 0.0);
        for (const auto& [m, c] : f.terms()) xcoef[static_cast<std::size_t>(m.i)] += c.to_double() * ipow(y, m.j);
        for (int i = 0; i <= n; ++i) {
            double x = node_x(i);
            double acc = 0;
            for (int k = degx; k >= 0; --k) acc = acc * x + xcoef[static_cast<std::size_t>(k)];
            out[static_cast<std::size_t>(i)] = acc - eps;
        }
    };

    // Edge ids: horizontal edge (i,j)-(i+1,j) and vertical edge (i,j)-(i,j+1).
    auto hedge = [&](int i, int j) {
        return (static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(n + 1) + static_cast<std::uint64_t>(i)) * 2;
    };
    auto vedge = [&](int i, int j) {
        return (static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(n + 1) + static_cast<std::uint64_t>(i)) * 2 + 1;
    };

    std::vector<MarchSegment> segs;
    MarchResult result;
    auto scan_boundary = [&](const std::vector<double>& row, bool edge_row) {
        if (edge_row) {
            for (double v : row)
                if (v < 0) result.boundary_inside = true;
        } else {
            if (row.front() < 0 || row.back() < 0) result.boundary_inside = true;
        }
    };
    eval_row(0, row_lo);
    scan_boundary(row_lo, true);
    for (int j = 0; j < n; ++j) {
        eval_row(j + 1, row_hi);
        scan_boundary(row_hi, j + 1 == n);
        double y0 = -r + step * j, y1 = y0 + step;
        for (int i = 0; i < n; ++i) {
            double v00 = row_lo[i], v10 = row_lo[i + 1];
            double v01 = row_hi[i], v11 = row_hi[i + 1];
            int mask = (v00 < 0 ? 1 : 0) | (v10 < 0 ? 2 : 0) | (v11 < 0 ? 4 : 0) | (v01 < 0 ? 8 : 0);
            if (mask == 0 || mask == 15) continue;
            double x0 = node_x(i), x1 = node_x(i + 1);
            auto lerp = [](double a, double b) {
                double t = a / (a - b);
                return std::clamp(t, 1e-9, 1.0 - 1e-9);
            };
            // Crossing points on the four cell edges (valid only when used).
            Vec2 bot{x0 + lerp(v00, v10) * (x1 - x0), y0};
            Vec2 top{x0 + lerp(v01, v11) * (x1 - x0), y1};
            Vec2 lef{x0, y0 + lerp(v00, v01) * (y1 - y0)};
            Vec2 rig{x1, y0 + lerp(v10, v11) * (y1 - y0)};
            std::uint64_t eb_ = hedge(i, j), et = hedge(i, j + 1), el = vedge(i, j), er = vedge(i + 1, j);
            auto emit = [&](Vec2 a, std::uint64_t ea, Vec2 b, std::uint64_t eb, bool saddle = false) {
                segs.push_back({a, b, ea, eb, saddle});
            };
            switch (mask) {
            case 1: case 14: emit(lef, el, bot, eb_); break;
            case 2: case 13: emit(bot, eb_, rig, er); break;
            case 4: case 11: emit(rig, er, top, et); break;
            case 8: case 7:  emit(top, et, lef, el); break;
            case 3: case 12: emit(lef, el, rig, er); break;
            case 6: case 9:  emit(bot, eb_, top, et); break;
            case 5: case 10: {
                double center = f.evaluate((x0 + x1) / 2, (y0 + y1) / 2) - eps;
                bool center_in = center < 0;
                bool pair_like_5 = (mask == 5) == center_in;
                if (pair_like_5) {
                    // inside corners connected through the centre
                    emit(bot, eb_, rig, er, true);
                    emit(top, et, lef, el, true);
                } else {
                    emit(lef, el, bot, eb_, true);
                    emit(rig, er, top, et, true);
                }
                break;
            }
            default: break;
            }
        }
        std::swap(row_lo, row_hi);
    }

    // Chain segments into loops via shared crossing edges.
    std::unordered_map<std::uint64_t, std::array<std::int64_t, 2>> incidence;
    incidence.reserve(segs.size() * 2);
    auto note = [&](std::uint64_t edge, std::int64_t seg) {
        auto [it, inserted] = incidence.try_emplace(edge, std::array<std::int64_t, 2>{-1, -1});
        if (it->second[0] < 0) it->second[0] = seg;
        else it->second[1] = seg;
    };
    for (std::size_t s = 0; s < segs.size(); ++s) {
        note(segs[s].ea, static_cast<std::int64_t>(s));
        note(segs[s].eb, static_cast<std::int64_t>(s));
    }

    std::vector<char> used(segs.size(), 0);
    for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
        if (used[s0]) continue;
        std::vector<Vec2> pts;
        bool saddle = false;
        bool closed = true;
        std::int64_t cur = static_cast<std::int64_t>(s0);
        std::uint64_t enter = segs[s0].ea;
        while (true) {
            const MarchSegment& sg = segs[static_cast<std::size_t>(cur)];
            used[static_cast<std::size_t>(cur)] = 1;
            saddle = saddle || sg.saddle;
            bool forward = (sg.ea == enter);
            pts.push_back(forward ? sg.a : sg.b);
            std::uint64_t exit = forward ? sg.eb : sg.ea;
            auto it = incidence.find(exit);
            std::int64_t next = -1;
            if (it != incidence.end())
                next = (it->second[0] == cur) ? it->second[1] : it->second[0];
            if (next < 0) { closed = false; break; }
            if (static_cast<std::size_t>(next) == s0) break; // loop closed
            cur = next;
            enter = exit;
        }
        if (!closed) {
            result.open_chains = true;
            continue;
        }
        if (pts.size() >= 3) {
            result.loops.push_back(std::move(pts));
            result.loop_saddle.push_back(saddle);
        }
    }
    return result;
}

inline void dedupe_consecutive(std::vector<Vec2>& pts, double tol) {
    std::vector<Vec2> out;
    out.reserve(pts.size());
    for (const Vec2& p : pts) {
        if (out.empty() || (p - out.back()).norm() > tol) out.push_back(p);
    }
    while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
    pts = std::move(out);
}

} // namespace trace_detail

// Closedness, simplicity, winding and orientation of a traced curve.
inline JordanReport verify_jordan(const LevelCurve& curve) {
    JordanReport rep;
    rep.closed = curve.points.size() >= 3;
    if (!rep.closed) return rep;
    auto crossing = polyline_self_intersection(curve.points);
    rep.simple = !crossing.has_value();
    rep.crossing = crossing;
    rep.winding = winding_number(curve.points, Vec2{0, 0});
    rep.counterclockwise = polygon_signed_area2(curve.points) > 0;
    for (double r : curve.residuals) rep.max_residual = std::max(rep.max_residual, r);
    return rep;
}

// Extracts the level curve of f at the given epsilon: marching squares over
// the neighbourhood square, selection of the loop around the origin, Newton
// refinement of every vertex onto f = epsilon along the gradient direction,
// and adaptive grid doubling when the loop is non-simple or saddle cells
// leave the contour ambiguous.
inline LevelCurve trace_level(const Polynomial& f, double epsilon, const Neighbourhood& nbhd,
                              const TraceConfig& cfg) {
    if (!(epsilon > 0)) throw DegenerateInput("epsilon must be positive");
    if (!nbhd.accepted) throw DegenerateInput("neighbourhood was not accepted");
    const double r = nbhd.radius;
    const Polynomial fx = f.derivative(Var::x);
    const Polynomial fy = f.derivative(Var::y);
    const double tol_abs = cfg.refine_tol * epsilon;

    int grid = cfg.grid_n;
    std::string last_problem = "no contour found";
    for (int attempt = 0; attempt <= cfg.max_refine; ++attempt, grid *= 2) {
        auto marched = trace_detail::march_squares(f, epsilon, r, grid);

        // The loop bounding the origin's component: contains the origin, and
        // innermost (smallest area) if several do.
        int chosen = -1;
        double best_area = 0;
        for (std::size_t k = 0; k < marched.loops.size(); ++k) {
            if (winding_number(marched.loops[k], Vec2{0, 0}) == 0) continue;
            double area = polygon_area(marched.loops[k]);
            if (chosen < 0 || area < best_area) {
                chosen = static_cast<int>(k);
                best_area = area;
            }
        }
        if (chosen < 0) {
            if (marched.open_chains || marched.boundary_inside)
                throw LevelEscapesNeighbourhood(
                    "level set reaches the neighbourhood boundary (epsilon too large)");
            last_problem = "no closed contour around the origin at grid " + std::to_string(grid);
            continue; // a finer grid may resolve a curve below cell size
        }
        std::vector<Vec2> pts = std::move(marched.loops[static_cast<std::size_t>(chosen)]);
        bool ambiguous = marched.loop_saddle[static_cast<std::size_t>(chosen)];

        double max_norm = 0;
        for (const Vec2& p : pts) max_norm = std::max(max_norm, p.norm());
        if (max_norm > r)
            throw LevelEscapesNeighbourhood("level curve touches the neighbourhood boundary");

        trace_detail::dedupe_consecutive(pts, 1e-13 * r);
        bool simple = pts.size() >= 3 && !polyline_self_intersection(pts).has_value();
        if ((!simple || ambiguous) && attempt < cfg.max_refine) {
            last_problem = simple ? "ambiguous saddle cells" : "self-intersecting contour";
            continue;
        }
        if (!simple)
            throw RefinementDiverged("contour still self-intersects at maximum refinement");

        // Newton refinement along the gradient.
        bool newton_ok = true;
        for (Vec2& p : pts) {
            bool converged = false;
            Vec2 q = p;
            for (int it = 0; it < kNewtonMaxIter; ++it) {
                double v = trace_detail::residual_at(f, q.x, q.y, epsilon, tol_abs);
                if (std::fabs(v) <= tol_abs) { converged = true; break; }
                Vec2 g{fx.evaluate(q.x, q.y), fy.evaluate(q.x, q.y)};
                double g2 = g.norm2();
                if (!(g2 > 1e-300) || !std::isfinite(v)) break;
                q = q - g * (v / g2);
            }
            if (!converged) { newton_ok = false; break; }
            p = q;
        }
        if (!newton_ok) {
            if (attempt < cfg.max_refine) {
                last_problem = "Newton refinement failed to converge";
                continue;
            }
            throw RefinementDiverged("Newton refinement did not reach tolerance");
        }

        trace_detail::dedupe_consecutive(pts, 1e-13 * r);
        if (pts.size() < 3 || polyline_self_intersection(pts).has_value()) {
            if (attempt < cfg.max_refine) {
                last_problem = "refinement broke simplicity";
                continue;
            }
            throw RefinementDiverged("refined contour is not simple");
        }

        if (polygon_signed_area2(pts) < 0) std::reverse(pts.begin(), pts.end());
        if (winding_number(pts, Vec2{0, 0}) != 1)
            throw RefinementDiverged("refined contour does not wind once around the origin");

        LevelCurve curve;
        curve.f = f;
        curve.epsilon = epsilon;
        curve.points = std::move(pts);
        curve.residuals.reserve(curve.points.size());
        for (const Vec2& p : curve.points)
            curve.residuals.push_back(
                std::fabs(trace_detail::residual_at(f, p.x, p.y, epsilon, tol_abs)));
        curve.nbhd = nbhd;
        curve.grid_used = grid;
        return curve;
    }
    throw NoComponentAroundOrigin(last_problem);
}

} // namespace curvetree
