#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "curvetree/config.hpp"
#include "curvetree/errors.hpp"
#include "curvetree/polar.hpp"
#include "curvetree/trace.hpp"

namespace curvetree {

// Validates candidate radii for a neighbourhood of the origin in which the
// level-curve machinery is justified: f positive off the origin, polar
// branches smooth and pairwise disjoint, x / f / distance strictly monotone
// along every polar half-branch, and each half-branch leaving the disk
// exactly once. Returns the largest candidate that passes.
inline Neighbourhood good_neighbourhood(const Polynomial& f, const TraceConfig& cfg) {
    if (!f.coeff(0, 0).is_zero())
        throw NotAStrictMinimum("f(0,0) != 0");
    if (!f.coeff(1, 0).is_zero() || !f.coeff(0, 1).is_zero())
        throw NotAStrictMinimum("gradient of f does not vanish at the origin");

    std::vector<double> candidates = cfg.nbhd_candidates;
    std::sort(candidates.begin(), candidates.end(), std::greater<>());
    if (candidates.empty()) throw DegenerateInput("no neighbourhood candidates configured");
    const double smallest = candidates.back();
    double nearest_negative = 1e300; // distance of the closest negative sample

    for (double r : candidates) {
        if (!(r > 0)) throw DegenerateInput("candidate radius must be positive");
        Neighbourhood nb;
        nb.radius = r;
        nb.checks.grid_samples = cfg.positivity_grid;

        // (i)-(ii): f strictly positive on the punctured closed disk.
        const int n = cfg.positivity_grid;
        bool positive = true, no_zero = true;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= n; ++j) {
                double x = -r + 2.0 * r * i / n;
                double y = -r + 2.0 * r * j / n;
                if (x * x + y * y > r * r) continue;
                if (x == 0.0 && y == 0.0) continue;
                double v = f.evaluate(x, y);
                if (v < 0) {
                    positive = false;
                    nearest_negative = std::min(nearest_negative, std::hypot(x, y));
                } else if (v == 0) {
                    no_zero = false;
                }
            }
        }
        nb.checks.only_minimum = positive;
        nb.checks.isolated_zero = positive && no_zero;
        if (!nb.checks.only_minimum || !nb.checks.isolated_zero) continue;

        // (iii): polar branches trace cleanly and meet only at the origin.
        std::vector<HalfBranch> branches;
        try {
            branches = polar_detail::trace_half_branches(f, r);
            nb.checks.polar_smooth = true;
        } catch (const Error&) {
            nb.checks.polar_smooth = false;
        }
        nb.checks.circle_samples = 4096;
        if (!nb.checks.polar_smooth) continue;

        // (iv)-(vi): monotonicity along each half-branch and a single exit.
        bool f_mono = true, x_mono = true, single_exit = true;
        for (const HalfBranch& hb : branches) {
            auto mx = check_monotone_along_branch(hb, MonotoneProbe::coordinate_x);
            auto mf = check_monotone_along_branch(hb, MonotoneProbe::function_f, f);
            auto md = check_monotone_along_branch(hb, MonotoneProbe::squared_distance);
            bool want_inc = hb.side == BranchSide::right;
            if (!mx.strict() || mx.increasing() != want_inc) x_mono = false;
            if (!mf.strict() || !mf.increasing()) f_mono = false;
            if (!md.strict() || !md.increasing()) single_exit = false;
            int boundary_hits = 0;
            for (const Vec2& p : hb.samples)
                if (p.norm() >= r * (1.0 - 1e-9)) ++boundary_hits;
            if (boundary_hits != 1) single_exit = false;
        }
        nb.checks.f_monotone = f_mono;
        nb.checks.x_monotone = x_mono;
        nb.checks.single_boundary_crossing = single_exit;
        if (!nb.checks.all()) continue;

        nb.accepted = true;
        auto cache = std::make_shared<PolarBranchCache>();
        cache->branches = std::move(branches);
        nb.polar_evidence = std::move(cache);
        return nb;
    }

    // negative values arbitrarily close to the origin mean the origin is not
    // a strict local minimum; negatives further out only disqualify radii
    if (nearest_negative <= 0.25 * smallest)
        throw NotAStrictMinimum("negative sample near the origin");
    throw NoValidRadius("no candidate radius satisfies the neighbourhood conditions");
}

} // namespace curvetree
