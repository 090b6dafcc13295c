#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "curvetree/errors.hpp"
#include "curvetree/geometry.hpp"
#include "curvetree/polynomial.hpp"
#include "curvetree/reeb.hpp"
#include "curvetree/trace.hpp"

namespace curvetree {

// Hull-distance threshold separating genuine pockets from discretisation
// noise, relative to the curve diameter.
inline constexpr double kHullTolFactor = 1e-7;

enum class MinimumClass { morse_convex, degenerate };

// Morse minima bound convex disks at small levels; everything else is
// classified degenerate and has to be measured geometrically.
inline MinimumClass classify_minimum(const Polynomial& f) {
    if (!f.coeff(0, 0).is_zero() || !f.coeff(1, 0).is_zero() || !f.coeff(0, 1).is_zero())
        throw NotACriticalPoint("origin is not a critical point with f(0,0) = 0");
    Definiteness d = hessian_definiteness_exact(f, Rational(0), Rational(0));
    return d == Definiteness::positive_definite ? MinimumClass::morse_convex
                                                : MinimumClass::degenerate;
}

struct ConvexityWitness {
    Vec2 p, n, q;          // endpoints of the offending chord and its midpoint
    double f_at_q = 0;
    bool exact_outside = false; // f(q) > eps certified in exact arithmetic
};

struct ConvexityReport {
    bool is_convex = false;
    double defect = 0;     // max distance from curve points to their convex hull
    double hull_tol = 0;
    std::optional<ConvexityWitness> witness;
    int reeb_vertex_count = 0;
};

inline ConvexityReport convexity_defect(const LevelCurve& curve, const ReebTree& tree) {
    ConvexityReport rep;
    rep.reeb_vertex_count = static_cast<int>(tree.vertices.size());
    const auto& pts = curve.points;
    if (pts.size() < 3) return rep;

    auto hull = convex_hull_indices(pts);
    double diameter = point_set_diameter(pts);
    rep.hull_tol = kHullTolFactor * diameter;

    // Distance of every curve point to the hull boundary, tracked per hull
    // edge so the deepest pocket yields the witness chord.
    std::vector<double> depth(pts.size(), 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double best = 1e300;
        for (std::size_t h = 0; h < hull.size(); ++h) {
            best = std::min(best, dist_point_segment(pts[i], pts[hull[h]],
                                                     pts[hull[(h + 1) % hull.size()]]));
            if (best == 0) break;
        }
        depth[i] = best;
        rep.defect = std::max(rep.defect, best);
    }
    rep.is_convex = rep.defect <= rep.hull_tol;

    if (!rep.is_convex) {
        // deepest point, then the hull edge it belongs to
        std::size_t deepest = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (depth[i] > depth[deepest]) deepest = i;
        std::size_t best_h = 0;
        double best_d = 1e300;
        for (std::size_t h = 0; h < hull.size(); ++h) {
            double d = dist_point_segment(pts[deepest], pts[hull[h]],
                                          pts[hull[(h + 1) % hull.size()]]);
            if (d < best_d) {
                best_d = d;
                best_h = h;
            }
        }
        ConvexityWitness w;
        Vec2 a = pts[hull[best_h]];
        Vec2 b = pts[hull[(best_h + 1) % hull.size()]];
        if (a.y < b.y) std::swap(a, b);
        w.p = a;
        w.n = b;
        w.q = (a + b) * 0.5;
        w.f_at_q = curve.f.evaluate(w.q.x, w.q.y);
        Rational exact = curve.f.evaluate_exact(Rational::from_double(w.q.x),
                                                Rational::from_double(w.q.y));
        w.exact_outside = exact > Rational::from_double(curve.epsilon);
        rep.witness = w;
    }
    return rep;
}

struct StarReport {
    bool is_star = false;
    std::vector<Vec2> kernel;            // possibly empty polygon
    std::optional<double> axis_used;     // symmetry axis y = value, when detected
    bool kernel_meets_axis = false;
    double resolution_caveat = 0;        // trace cell size the verdict inherits
};

inline StarReport star_kernel(const LevelCurve& curve) {
    StarReport rep;
    rep.kernel = polygon_kernel(curve.points);
    rep.is_star = !rep.kernel.empty();
    rep.resolution_caveat = 2.0 * curve.nbhd.radius / std::max(curve.grid_used, 1);

    if (curve.f.symmetric_in_y()) {
        rep.axis_used = 0.0;
        if (rep.is_star) {
            double lo = 1e300, hi = -1e300;
            for (const Vec2& p : rep.kernel) {
                lo = std::min(lo, p.y);
                hi = std::max(hi, p.y);
            }
            rep.kernel_meets_axis = lo <= 0.0 && 0.0 <= hi;
        }
    }
    return rep;
}

struct WitnessReport {
    Vec2 midpoint;
    double f_at_midpoint = 0;
    bool exceeds = false; // f(midpoint) > eps, certified in exact arithmetic
};

// Segment witness against star-shapedness: both ends inside the level set,
// midpoint outside. The verdict is decided in exact rational arithmetic on
// the exact dyadic values of the input coordinates.
inline WitnessReport midpoint_witness(const Polynomial& f, double epsilon, Vec2 a, Vec2 b) {
    double slack = 1e-6 * epsilon + 1e-12;
    if (f.evaluate(a.x, a.y) > epsilon + slack || f.evaluate(b.x, b.y) > epsilon + slack)
        throw DegenerateInput("witness endpoints must lie in the sublevel set");
    WitnessReport rep;
    rep.midpoint = (a + b) * 0.5;
    rep.f_at_midpoint = f.evaluate(rep.midpoint.x, rep.midpoint.y);
    Rational exact = f.evaluate_exact(Rational::from_double(rep.midpoint.x),
                                      Rational::from_double(rep.midpoint.y));
    rep.exceeds = exact > Rational::from_double(epsilon);
    return rep;
}

} // namespace curvetree
