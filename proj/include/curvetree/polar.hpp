#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "curvetree/errors.hpp"
#include "curvetree/geometry.hpp"
#include "curvetree/polynomial.hpp"
#include "curvetree/trace.hpp"

namespace curvetree {

// Fixed numeric policy for the polar machinery.
inline constexpr double kBranchTol = 1e-8;          // polar residual, relative to gradient scale
inline constexpr double kMergeTolFactor = 1e-6;     // tangency merge distance, times radius
inline constexpr double kSeedCircleFactor = 1.0 / 64.0; // seed circle radius, times radius

enum class BranchSide { left, right };

struct HalfBranch;
struct PolarBranchCache {
    std::vector<HalfBranch> branches;
};

// Sampled polar half-branch, ordered from the origin outward. The first
// sample is the origin itself; the sign of x is constant on the rest.
struct HalfBranch {
    std::vector<Vec2> samples;
    BranchSide side = BranchSide::right;
    int id = 0;
};

enum class TangencyParity { even, odd };

struct TangencyPoint {
    Vec2 position;
    TangencyParity parity = TangencyParity::even;
    std::optional<int> branch_id;
    bool merged = false; // absorbed a twin closer than the merge tolerance
};

enum class MonotoneProbe { coordinate_x, function_f, squared_distance };

struct MonotonicityReport {
    enum class Direction { strictly_increasing, strictly_decreasing, violation };
    Direction direction = Direction::violation;
    std::optional<std::size_t> violation_index;

    bool strict() const { return direction != Direction::violation; }
    bool increasing() const { return direction == Direction::strictly_increasing; }
};

// The polar curve of f with respect to x is the zero set of df/dy. When f
// has the shape of a strict local minimum at the origin, df/dy cannot be
// divisible by x; this is asserted on the exact term map.
inline Polynomial polar_curve(const Polynomial& f) {
    Polynomial g = f.derivative(Var::y);
    if (g.is_zero()) throw ConstantInY("polynomial is constant in y; polar curve undefined");
    bool critical_origin = f.coeff(0, 0).is_zero() && f.coeff(1, 0).is_zero() && f.coeff(0, 1).is_zero();
    if (critical_origin) {
        // cheap positivity scan; only a minimum-like f triggers the assertion
        bool nonneg = true;
        for (int i = -8; i <= 8 && nonneg; ++i)
            for (int j = -8; j <= 8 && nonneg; ++j) {
                if (i == 0 && j == 0) continue;
                if (f.evaluate(i * 0.01, j * 0.01) < 0) nonneg = false;
            }
        if (nonneg && g.divisible_by_x())
            throw PolarContainsProjection("polar curve contains the projection direction x = 0");
    }
    return g;
}

namespace polar_detail {

// Sign of g(p) trusted down to the double-double noise floor.
inline int robust_sign(const Polynomial& g, double x, double y) {
    auto [v, scale] = g.evaluate_with_scale(x, y);
    double noise = scale * 1e-14;
    if (std::fabs(v) > noise) return v > 0 ? 1 : -1;
    dd w = g.evaluate_dd(x, y);
    double noise_dd = scale * 1e-30;
    if (std::fabs(w.value()) <= noise_dd) return 0;
    return w.value() > 0 ? 1 : -1;
}

inline double robust_value(const Polynomial& g, double x, double y, double tol) {
    auto [v, scale] = g.evaluate_with_scale(x, y);
    double noise = scale * 1e-15;
    if (noise <= 0.25 * std::fabs(tol)) return v;
    return g.evaluate_dd(x, y).value();
}

struct SeedScan {
    std::vector<double> angles;
    int base_samples = 0;
};

// Zeros of g on the circle of radius s. Tangent polar components cross the
// circle in clusters whose angular separation can be far below the uniform
// sampling step (s^2, s^4 scales), and an odd number of crossings in one
// sampling interval reads as a single sign change. Every interval containing
// a sign change or an |g| dip is therefore subdivided recursively until the
// crossings are individually resolved. Exact-zero samples count as seeds.
inline SeedScan seed_angles(const Polynomial& g, const Polynomial& gx, const Polynomial& gy,
                            double s, int base_n = 4096) {
    SeedScan out;
    out.base_samples = base_n;
    long budget = 2000000;
    const double resolved_arc = 1e-9; // below this, coincident crossings merge

    auto value = [&](double th) { return robust_value(g, s * std::cos(th), s * std::sin(th), 0.0); };
    auto sgn = [&](double th) { return robust_sign(g, s * std::cos(th), s * std::sin(th)); };
    // derivative of g along the circle; even-multiplicity components touch
    // the zero level without a sign flip and are found at its odd zeros
    auto dsgn = [&](double th) {
        double x = s * std::cos(th), y = s * std::sin(th);
        auto [vx, sx] = gx.evaluate_with_scale(x, y);
        auto [vy, sy] = gy.evaluate_with_scale(x, y);
        double v = -vx * y + vy * x;
        double noise = (sx * std::fabs(y) + sy * std::fabs(x)) * 1e-14;
        if (std::fabs(v) > noise) return v > 0 ? 1 : -1;
        return 0;
    };
    auto refine_even = [&](double a, double b) -> std::optional<double> {
        int sa = dsgn(a), sb = dsgn(b);
        if (sa == 0 || sb == 0 || sa == sb) return std::nullopt;
        double edge = std::max({std::fabs(value(a)), std::fabs(value(b)), 1e-300});
        double w0 = b - a;
        for (int it = 0; it < 70 && (b - a) > 1e-15; ++it) {
            double m = 0.5 * (a + b);
            int sm = dsgn(m);
            if (sm == 0) { a = b = m; break; }
            if (sm == sa) a = m;
            else b = m;
        }
        double th = 0.5 * (a + b);
        double centre = std::fabs(value(th));
        auto [vc, sc] = g.evaluate_with_scale(s * std::cos(th), s * std::sin(th));
        // an even crossing collapses quadratically with the bracket; a near
        // miss bottoms out at its genuine minimum
        double mu = ((b - a) + 1e-300) / (w0 + 1e-300);
        if (centre <= std::max(sc * 1e-30 * 16.0, edge * mu)) return th;
        return std::nullopt;
    };

    auto bisect = [&](double a, double b, int sa) {
        for (int it = 0; it < 80 && (b - a) > 1e-16; ++it) {
            double m = 0.5 * (a + b);
            int sm = sgn(m);
            if (sm == 0) return m;
            if (sm == sa) a = m;
            else b = m;
        }
        return 0.5 * (a + b);
    };

    struct Arc { double a, b; int depth; };
    std::vector<Arc> work{{0.0, 2.0 * std::acos(-1.0), 0}};
    while (!work.empty()) {
        Arc arc = work.back();
        work.pop_back();
        int n = arc.depth == 0 ? base_n : 64;
        std::vector<double> th(static_cast<std::size_t>(n) + 1), va(th.size());
        std::vector<int> sg(th.size());
        for (int k = 0; k <= n; ++k) {
            std::size_t ku = static_cast<std::size_t>(k);
            th[ku] = arc.a + (arc.b - arc.a) * k / n;
            va[ku] = value(th[ku]);
            sg[ku] = va[ku] > 0 ? 1 : (va[ku] < 0 ? -1 : 0);
            if (--budget < 0) throw SeedDetectionFailed("seed scan exceeded its evaluation budget");
        }
        double step = (arc.b - arc.a) / n;
        double vmax = 0;
        for (double v : va) vmax = std::max(vmax, std::fabs(v));
        for (int k = 0; k < n; ++k) {
            std::size_t ku = static_cast<std::size_t>(k);
            if (sg[ku] == 0) {
                out.angles.push_back(th[ku]);
                continue;
            }
            if (sg[ku + 1] != 0 && sg[ku] != sg[ku + 1]) {
                if (step <= resolved_arc || arc.depth >= 14)
                    out.angles.push_back(bisect(th[ku], th[ku + 1], sg[ku]));
                else
                    work.push_back({th[ku], th[ku + 1], arc.depth + 1});
            }
        }
        // zoom into dips: interior minima of |g| well below the arc's scale
        // (root pairs hide in them, even right next to a flip)
        for (int k = 1; k < n; ++k) {
            std::size_t ku = static_cast<std::size_t>(k);
            double m = std::fabs(va[ku]);
            if (m == 0.0) continue;
            if (m <= std::fabs(va[ku - 1]) && m <= std::fabs(va[ku + 1]) && m < 1e-4 * vmax) {
                if (arc.depth < 14 && step > resolved_arc) {
                    work.push_back({th[ku - 1], th[ku + 1], arc.depth + 1});
                } else if (sg[ku - 1] == sg[ku] && sg[ku] == sg[ku + 1]) {
                    if (auto even = refine_even(th[ku - 1], th[ku + 1]))
                        out.angles.push_back(*even);
                }
            }
        }
    }
    std::sort(out.angles.begin(), out.angles.end());
    out.angles.erase(std::unique(out.angles.begin(), out.angles.end(),
                                 [](double a, double b) { return std::fabs(a - b) < 1e-10; }),
                     out.angles.end());
    if (!out.angles.empty() && out.angles.back() > 2.0 * std::acos(-1.0) - 1e-10 &&
        std::fabs(out.angles.front()) < 1e-10)
        out.angles.pop_back();
    return out;
}

// All odd-multiplicity zeros of g on the segment p + t*n, |t| <= span,
// as sorted offsets t. Flip intervals and |g| dips are subdivided
// recursively, so crossings of clustered tangent branches are resolved
// individually down to ~1e-7 of the span.
inline void scan_segment_roots(const Polynomial& g, const Polynomial& gx, const Polynomial& gy,
                               Vec2 p, Vec2 n, double span, double resolve_floor,
                               std::vector<double>& roots) {
    roots.clear();
    auto sgn = [&](double t) { return robust_sign(g, p.x + t * n.x, p.y + t * n.y); };
    auto val = [&](double t) { return robust_value(g, p.x + t * n.x, p.y + t * n.y, 0.0); };
    // directional derivative along the segment; its odd zero locates an
    // even-multiplicity crossing of g (no sign flip to bisect there)
    auto dsgn = [&](double t) {
        double x = p.x + t * n.x, y = p.y + t * n.y;
        auto [vx, sx] = gx.evaluate_with_scale(x, y);
        auto [vy, sy] = gy.evaluate_with_scale(x, y);
        double v = vx * n.x + vy * n.y;
        double noise = (sx * std::fabs(n.x) + sy * std::fabs(n.y)) * 1e-14;
        if (std::fabs(v) > noise) return v > 0 ? 1 : -1;
        return 0;
    };
    auto refine_even = [&](double a, double b) -> std::optional<double> {
        int sa = dsgn(a), sb = dsgn(b);
        if (sa == 0 || sb == 0 || sa == sb) return std::nullopt;
        double edge = std::max({std::fabs(val(a)), std::fabs(val(b)), 1e-300});
        double w0 = b - a;
        for (int it = 0; it < 70 && (b - a) > 1e-15 * span; ++it) {
            double m = 0.5 * (a + b);
            int sm = dsgn(m);
            if (sm == 0) { a = b = m; break; }
            if (sm == sa) a = m;
            else b = m;
        }
        double tstar = 0.5 * (a + b);
        // accept only a genuine touch of the zero level: an even crossing
        // collapses quadratically with the bracket, a near miss bottoms out
        double centre = std::fabs(val(tstar));
        auto [vc, sc] = g.evaluate_with_scale(p.x + tstar * n.x, p.y + tstar * n.y);
        double noise = sc * 1e-30;
        double mu = ((b - a) + 1e-300) / (w0 + 1e-300);
        if (centre <= std::max(noise * 16.0, edge * mu)) return tstar;
        return std::nullopt;
    };

    auto bisect = [&](double a, double b, int sa) {
        for (int it = 0; it < 70 && (b - a) > 1e-15 * span; ++it) {
            double m = 0.5 * (a + b);
            int sm = sgn(m);
            if (sm == 0) return m;
            if (sm == sa) a = m;
            else b = m;
        }
        return 0.5 * (a + b);
    };

    struct Iv { double a, b; int depth; };
    std::vector<Iv> work{{-span, span, 0}};
    while (!work.empty()) {
        Iv iv = work.back();
        work.pop_back();
        int k = iv.depth == 0 ? 48 : 16;
        std::vector<double> ts(static_cast<std::size_t>(k) + 1), vs(ts.size());
        std::vector<int> ss(ts.size());
        double vmax = 0;
        for (int i = 0; i <= k; ++i) {
            std::size_t iu = static_cast<std::size_t>(i);
            ts[iu] = iv.a + (iv.b - iv.a) * i / k;
            vs[iu] = val(ts[iu]);
            ss[iu] = vs[iu] > 0 ? 1 : (vs[iu] < 0 ? -1 : 0);
            vmax = std::max(vmax, std::fabs(vs[iu]));
        }
        // An interval may be declared a single crossing once it is narrow
        // relative to its distance from the predictor (the caller's ratio
        // test needs any hidden neighbour roots to be individually visible)
        // or below the resolve floor (hidden neighbours closer than that are
        // within the trace resolution, so the choice does not matter).
        auto resolved = [&](double a, double b) {
            double mid = std::fabs(0.5 * (a + b));
            return (b - a) <= std::max(0.25 * mid, resolve_floor);
        };
        for (int i = 0; i < k; ++i) {
            std::size_t iu = static_cast<std::size_t>(i);
            if (ss[iu] == 0) {
                roots.push_back(ts[iu]);
                continue;
            }
            if (ss[iu + 1] != 0 && ss[iu] != ss[iu + 1]) {
                if (iv.depth >= 12 || resolved(ts[iu], ts[iu + 1]))
                    roots.push_back(bisect(ts[iu], ts[iu + 1], ss[iu]));
                else
                    work.push_back({ts[iu], ts[iu + 1], iv.depth + 1});
            }
        }
        for (int i = 1; i < k; ++i) {
            std::size_t iu = static_cast<std::size_t>(i);
            double m = std::fabs(vs[iu]);
            if (m == 0.0) continue;
            // |g| dips may hide root pairs (no net sign change), including
            // right next to a simple flip, so neighbour signs do not matter
            if (m <= std::fabs(vs[iu - 1]) && m <= std::fabs(vs[iu + 1]) && m < 1e-3 * vmax) {
                if (iv.depth < 12 && !resolved(ts[iu - 1], ts[iu + 1])) {
                    work.push_back({ts[iu - 1], ts[iu + 1], iv.depth + 1});
                } else if (ss[iu - 1] == ss[iu] && ss[iu] == ss[iu + 1]) {
                    if (auto even = refine_even(ts[iu - 1], ts[iu + 1]))
                        roots.push_back(*even);
                }
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    double merge = std::max(1e-13 * span, 0.25 * resolve_floor);
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double a, double b) { return std::fabs(a - b) < merge; }),
                roots.end());
}

// Identity of a trace inside a bundle of tangent branches. Seeds closer
// than the trace resolution start as one bundle; their transversal order
// along the marching normal equals their order on the seed circle and can
// never change (distinct half-branches do not cross), so once the scan
// resolves the whole bundle, each trace takes the root of its own rank.
struct LaneId {
    int rank = 0; // position within the bundle, by ascending normal offset
    int size = 1; // bundle size
};

// Corrector: pull the predictor back onto g = 0 along the normal. Roots
// within the bundle window are claimed by rank when the bundle is fully
// resolved and by proximity while it is still collapsed; a root outside the
// window is only tolerated when it is at least three times farther away
// than the accepted one. Returns the signed correction, or nullopt when the
// situation is ambiguous at this step size.
inline std::optional<double> correct_onto_polar(const Polynomial& g, const Polynomial& gx,
                                                const Polynomial& gy, Vec2& p, Vec2 n, double h,
                                                double resolve_floor, LaneId lane = {}) {
    double nn = n.norm();
    if (!(nn > 0)) return std::nullopt;
    n = n * (1.0 / nn);

    thread_local std::vector<double> roots;
    scan_segment_roots(g, gx, gy, p, n, 0.75 * h, resolve_floor, roots);
    if (roots.empty()) return std::nullopt;

    std::size_t best = 0;
    for (std::size_t i = 1; i < roots.size(); ++i)
        if (std::fabs(roots[i]) < std::fabs(roots[best])) best = i;
    double t1 = roots[best];

    // bundle window around the nearest root
    double window = std::max(32.0 * resolve_floor, 8.0 * std::fabs(t1));
    thread_local std::vector<double> mates;
    mates.clear();
    double outsider = 1e300;
    for (double t : roots) {
        if (std::fabs(t - t1) <= window) mates.push_back(t);
        else outsider = std::min(outsider, std::fabs(t - t1));
    }
    if (static_cast<int>(mates.size()) > lane.size) return std::nullopt; // over-full bundle
    double chosen = t1;
    if (static_cast<int>(mates.size()) == lane.size && lane.size > 1) {
        // fully resolved bundle: take the root of our rank
        std::sort(mates.begin(), mates.end());
        chosen = mates[static_cast<std::size_t>(lane.rank)];
    } else if (mates.size() > 1) {
        // partially resolved: proximity decides, but only when unambiguous
        double runner_up = 1e300;
        for (double t : mates)
            if (t != t1) runner_up = std::min(runner_up, std::fabs(t - t1));
        if (!(runner_up > 3.0 * std::fabs(t1) + 1e-13 * h)) return std::nullopt;
    }
    if (!(outsider > 3.0 * std::fabs(chosen) + 1e-13 * h)) return std::nullopt;

    p = {p.x + chosen * n.x, p.y + chosen * n.y};
    return chosen;
}

// Marches the polar branch from `start` with radially oriented steps
// (outward = +1, inward = -1) until the stop predicate fires. Appends
// samples (not including `start`). `h0` is the initial step; chords are kept
// within `sag_tol` of the branch. Returns false only if the march stalls
// before the stop predicate fires.
template <typename Stop>
inline bool march_branch(const Polynomial& g, const Polynomial& gx, const Polynomial& gy,
                         Vec2 start, double r, int radial_dir, double h0, double sag_tol,
                         LaneId lane, Stop&& stop, std::vector<Vec2>& out) {
    Vec2 p = start;
    double pn = p.norm();
    Vec2 dir = pn > 0 ? p * (radial_dir / pn) : Vec2{double(radial_dir), 0};
    // the normal is perp(dir); rank was assigned along increasing angle,
    // which matches increasing normal offset for the outward direction and
    // reverses for the inward one
    if (radial_dir < 0 && lane.size > 1) lane.rank = lane.size - 1 - lane.rank;
    double h = h0;
    const double h_min = r * 1e-13;
    const double h_max = r / 256.0;
    for (int iter = 0; iter < 400000; ++iter) {
        if (stop(p)) return true;
        // marching inward must not step across the origin
        if (radial_dir < 0) h = std::min(h, std::max(0.5 * p.norm(), h_min));
        bool stepped = false;
        while (h >= h_min) {
            Vec2 q = p + dir * h;
            Vec2 n{-dir.y, dir.x};
            Vec2 corrected = q;
            auto corr = correct_onto_polar(g, gx, gy, corrected, n, h, 0.5 * sag_tol, lane);
            if (corr.has_value() && (corrected - q).norm() <= 0.5 * h) {
                // chord quality: the correction tracks the deviation from a
                // straight continuation, about an order above the sagitta
                if (std::fabs(*corr) > 10.0 * sag_tol) {
                    h *= 0.5;
                    continue;
                }
                double moved = (corrected - p).norm();
                if (!(moved > 0)) return false;
                dir = (corrected - p) * (1.0 / moved);
                p = corrected;
                out.push_back(p);
                stepped = true;
                if (std::fabs(*corr) < 2.0 * sag_tol) h = std::min(h * 1.6, h_max);
                break;
            }
            h *= 0.5;
        }
        if (!stepped) return false;
    }
    return false;
}

inline std::vector<HalfBranch> trace_half_branches_once(const Polynomial& f, double radius,
                                                        double h0, double sag_tol) {
    Polynomial g = f.derivative(Var::y);
    if (g.is_zero()) throw ConstantInY("polynomial is constant in y; polar curve undefined");
    Polynomial gx = g.derivative(Var::x);
    Polynomial gy = g.derivative(Var::y);

    const double s = radius * kSeedCircleFactor;
    SeedScan scan = seed_angles(g, gx, gy, s);
    if (scan.angles.empty())
        throw SeedDetectionFailed("no polar seeds found on the seed circle");

    // Bundle seeds closer than the trace resolution: their traces share a
    // collapsed prefix and are told apart by rank (see LaneId).
    const double bundle_tol = 64.0 * sag_tol;
    std::vector<LaneId> lanes(scan.angles.size());
    {
        std::vector<std::size_t> group{0};
        auto flush = [&] {
            for (std::size_t k = 0; k < group.size(); ++k) {
                lanes[group[k]].rank = static_cast<int>(k);
                lanes[group[k]].size = static_cast<int>(group.size());
            }
            group.clear();
        };
        for (std::size_t i = 1; i < scan.angles.size(); ++i) {
            double gap = s * (scan.angles[i] - scan.angles[group.back()]);
            if (gap > bundle_tol) flush();
            group.push_back(i);
        }
        // wrap-around: merge a trailing group adjacent to the first seed
        if (!group.empty() && lanes.size() > group.size()) {
            double wrap_gap =
                s * (scan.angles.front() + 2 * std::acos(-1.0) - scan.angles[group.back()]);
            if (wrap_gap <= bundle_tol && group.front() != 0) {
                // rare; treat the wrapped cluster as one bundle starting at the tail
                std::size_t head = 0;
                while (head + 1 < scan.angles.size() &&
                       s * (scan.angles[head + 1] - scan.angles[head]) <= bundle_tol)
                    ++head;
                for (std::size_t i = 0; i <= head; ++i) group.push_back(i);
            }
        }
        flush();
    }

    std::vector<HalfBranch> branches;
    for (std::size_t si = 0; si < scan.angles.size(); ++si) {
        double th = scan.angles[si];
        LaneId lane = lanes[si];
        Vec2 seed{s * std::cos(th), s * std::sin(th)};

        std::vector<Vec2> outward;
        bool reached = march_branch(g, gx, gy, seed, radius, +1, h0, sag_tol, lane,
                                    [&](Vec2 p) { return p.norm() >= radius; }, outward);
        if (!reached || outward.empty())
            throw BranchSelfCrossing("polar branch stalled before the boundary (singular point?)");
        // land the last sample on the boundary circle by shrinking the final chord
        {
            Vec2 inside = outward.size() >= 2 ? outward[outward.size() - 2] : seed;
            Vec2 outside = outward.back();
            Vec2 chord = outside - inside;
            Vec2 n{-chord.y, chord.x};
            for (int it = 0; it < 60; ++it) {
                Vec2 mid = (inside + outside) * 0.5;
                correct_onto_polar(g, gx, gy, mid, n, 0.25 * chord.norm() + 1e-300,
                                   0.5 * sag_tol);
                if (mid.norm() >= radius) outside = mid;
                else inside = mid;
            }
            outward.back() = outside;
        }

        // inward: stop where the germ becomes numerically inseparable, then
        // trim anything past the first |x| reversal (tangent components get
        // indistinguishable there; the rest of the germ is the chord to the
        // origin)
        std::vector<Vec2> inward;
        march_branch(g, gx, gy, seed, radius, -1, std::min(h0, s / 64.0), sag_tol, lane,
                     [&](Vec2 p) { return p.norm() <= s / 16.0; }, inward);
        {
            std::size_t keep = 0;
            double prev_ax = std::fabs(seed.x);
            for (; keep < inward.size(); ++keep) {
                double ax = std::fabs(inward[keep].x);
                if (ax >= prev_ax || (seed.x > 0) != (inward[keep].x > 0)) break;
                prev_ax = ax;
            }
            inward.resize(keep);
        }

        HalfBranch hb;
        hb.samples.push_back(Vec2{0, 0});
        for (auto it = inward.rbegin(); it != inward.rend(); ++it) hb.samples.push_back(*it);
        hb.samples.push_back(seed);
        for (const Vec2& p : outward) hb.samples.push_back(p);

        // Decimate jitter: where branches sit closer than the trace
        // resolution, consecutive samples can wobble across the collapsed
        // pair by less than the step progress. Tiny reversals of x or of the
        // radius are dropped; anything above the resolution scale is kept
        // (a genuine reversal must stay visible to the monotonicity checks).
        {
            const double jitter = 8.0 * sag_tol;
            const double dir_x = seed.x >= 0 ? 1.0 : -1.0;
            std::vector<Vec2> kept;
            kept.reserve(hb.samples.size());
            kept.push_back(hb.samples.front());
            for (std::size_t k = 1; k < hb.samples.size(); ++k) {
                const Vec2& cand = hb.samples[k];
                const Vec2& last = kept.back();
                double dx = (cand.x - last.x) * dir_x;
                double dn = cand.norm() - last.norm();
                bool advances = dx > 0 && dn > 0;
                bool genuine_reversal = dx < -jitter || dn < -jitter;
                if (advances || genuine_reversal) kept.push_back(cand);
            }
            // never lose the boundary landing
            if (kept.back() != hb.samples.back()) kept.push_back(hb.samples.back());
            hb.samples = std::move(kept);
        }

        double xsum = 0;
        for (const Vec2& p : hb.samples)
            if (p.norm() > 0.5 * s) xsum += (p.x > 0 ? 1.0 : (p.x < 0 ? -1.0 : 0.0));
        hb.side = xsum >= 0 ? BranchSide::right : BranchSide::left;
        hb.id = static_cast<int>(branches.size());
        branches.push_back(std::move(hb));
    }
    return branches;
}

// Crossing scan over the whole branch set via a uniform spatial hash,
// ignoring the common germ inside the exclusion disk about the origin
// (tangent components meet there by construction). Same-branch segment
// pairs are exempt: strict x-monotonicity already forbids self-crossings.
inline bool branch_set_disjoint(const std::vector<HalfBranch>& branches, double exclude,
                                double coincident_tol = 0.0) {
    struct Seg { Vec2 a, b; std::size_t branch; };
    std::vector<Seg> segs;
    double max_len = 1e-300;
    for (std::size_t bi = 0; bi < branches.size(); ++bi) {
        const auto& ss = branches[bi].samples;
        for (std::size_t i = 0; i + 1 < ss.size(); ++i) {
            if (ss[i].norm() < exclude || ss[i + 1].norm() < exclude) continue;
            segs.push_back({ss[i], ss[i + 1], bi});
            max_len = std::max(max_len, (ss[i + 1] - ss[i]).norm());
        }
    }
    double cell = max_len;
    auto key = [&](long long cx, long long cy) {
        return static_cast<std::uint64_t>(cx) * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(cy);
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
    grid.reserve(segs.size() * 2);
    for (std::size_t i = 0; i < segs.size(); ++i) {
        long long x0 = static_cast<long long>(std::floor(std::min(segs[i].a.x, segs[i].b.x) / cell));
        long long x1 = static_cast<long long>(std::floor(std::max(segs[i].a.x, segs[i].b.x) / cell));
        long long y0 = static_cast<long long>(std::floor(std::min(segs[i].a.y, segs[i].b.y) / cell));
        long long y1 = static_cast<long long>(std::floor(std::max(segs[i].a.y, segs[i].b.y) / cell));
        for (long long cx = x0; cx <= x1; ++cx) {
            for (long long cy = y0; cy <= y1; ++cy) {
                auto& bucket = grid[key(cx, cy)];
                for (std::size_t j : bucket) {
                    if (segs[j].branch == segs[i].branch) continue;
                    if (!segments_intersect(segs[i].a, segs[i].b, segs[j].a, segs[j].b)) continue;
                    // tangent branches closer than the trace resolution look
                    // crossed; only transversal intersections count, so
                    // measure the perpendicular gap between the lines
                    auto perp = [](Vec2 p, Vec2 a, Vec2 b) {
                        Vec2 ab = b - a;
                        double len = ab.norm();
                        return len > 0 ? std::fabs(ab.cross(p - a)) / len : (p - a).norm();
                    };
                    double sep = std::max(std::max(perp(segs[i].a, segs[j].a, segs[j].b),
                                                   perp(segs[i].b, segs[j].a, segs[j].b)),
                                          std::max(perp(segs[j].a, segs[i].a, segs[i].b),
                                                   perp(segs[j].b, segs[i].a, segs[i].b)));
                    if (sep > coincident_tol) return false;
                }
                bucket.push_back(i);
            }
        }
    }
    return true;
}

// Sign of f(b) - f(a) along a branch, escalated double -> double-double ->
// exact rational, with a tie band. Samples sit off the true branch by a
// positional residual u; for very flat polynomials (x^16-order terms) the
// induced perturbation of f dominates the genuine variation of f along the
// branch, and no arithmetic can recover the latter from the samples. A
// difference below the perturbation band is therefore reported as a tie (0)
// rather than a sign.
inline int compare_f_values(const Polynomial& f, Vec2 a, Vec2 b) {
    // perturbation band: |grad f| u + |Hess f| u^2 at both ends
    static thread_local const Polynomial* cached_f = nullptr;
    static thread_local std::vector<Polynomial> derivs;
    if (cached_f != &f || derivs.empty()) {
        Polynomial px = f.derivative(Var::x), py = f.derivative(Var::y);
        derivs = {px, py, px.derivative(Var::x), px.derivative(Var::y), py.derivative(Var::y)};
        cached_f = &f;
    }
    auto band_at = [&](Vec2 p) {
        double u = 1e-15 * std::max(1.0, p.norm());
        double g1 = std::fabs(derivs[0].evaluate(p.x, p.y)) + std::fabs(derivs[1].evaluate(p.x, p.y));
        double g2 = std::fabs(derivs[2].evaluate(p.x, p.y)) +
                    2 * std::fabs(derivs[3].evaluate(p.x, p.y)) +
                    std::fabs(derivs[4].evaluate(p.x, p.y));
        return g1 * u + g2 * u * u;
    };
    const double band = band_at(a) + band_at(b);

    auto [va, sa] = f.evaluate_with_scale(a.x, a.y);
    auto [vb, sb] = f.evaluate_with_scale(b.x, b.y);
    double noise = (sa + sb) * 1e-15;
    double d = vb - va;
    if (std::fabs(d) > noise + band) return d > 0 ? 1 : -1;
    dd wd = f.evaluate_dd(b.x, b.y) - f.evaluate_dd(a.x, a.y);
    double noise_dd = (sa + sb) * 1e-31;
    if (std::fabs(wd.value()) > noise_dd + band) return wd.value() > 0 ? 1 : -1;
    if (std::fabs(wd.value()) <= band && noise_dd <= band) return 0;

    Rational ra = f.evaluate_exact(Rational::from_double(a.x), Rational::from_double(a.y));
    Rational rb = f.evaluate_exact(Rational::from_double(b.x), Rational::from_double(b.y));
    Rational diff = rb - ra;
    if (diff.is_zero()) return 0;
    double dv = diff.to_double();
    if (std::fabs(dv) <= band) return 0;
    return diff.sign();
}

} // namespace polar_detail

namespace polar_detail {

// Trace with a retry ladder: germs of tangent components can defeat the
// predictor at the default step (the trace hops between branches, which
// shows up as crossings); retries shrink the initial step until the germ
// is resolved.
inline std::vector<HalfBranch> trace_half_branches(const Polynomial& f, double radius) {
    const double sag_tol = 2e-7 * radius;
    double h0 = radius / 2048.0;
    std::string last;
    for (int attempt = 0; attempt < 4; ++attempt, h0 /= 8.0) {
        std::vector<HalfBranch> branches;
        try {
            branches = trace_half_branches_once(f, radius, h0, sag_tol);
        } catch (const BranchSelfCrossing& e) {
            last = e.what();
            continue;
        }
        if (branch_set_disjoint(branches, radius * kSeedCircleFactor, 8.0 * sag_tol))
            return branches;
        last = "polar half-branches cross away from the origin";
    }
    throw BranchSelfCrossing(last.empty() ? "polar branch tracing failed" : last);
}

} // namespace polar_detail

// Traces the half-branches of the polar curve inside the neighbourhood:
// seeds are the zeros of df/dy on a small circle about the origin, each
// continued outward to the boundary and inward toward the origin.
inline std::vector<HalfBranch> polar_half_branches(const Polynomial& f, const Neighbourhood& nbhd,
                                                   const TraceConfig&) {
    if (!nbhd.accepted) throw DegenerateInput("neighbourhood was not accepted");
    if (nbhd.polar_evidence) return nbhd.polar_evidence->branches;
    return polar_detail::trace_half_branches(f, nbhd.radius);
}

inline MonotonicityReport check_monotone_along_branch(const HalfBranch& branch, MonotoneProbe probe,
                                                      const Polynomial& f = Polynomial()) {
    MonotonicityReport rep;
    if (branch.samples.size() < 3) {
        rep.direction = MonotonicityReport::Direction::violation;
        rep.violation_index = 0;
        return rep;
    }
    auto step_sign = [&](const Vec2& a, const Vec2& b) {
        switch (probe) {
        case MonotoneProbe::coordinate_x:
            return b.x > a.x ? 1 : (b.x < a.x ? -1 : 0);
        case MonotoneProbe::function_f:
            return polar_detail::compare_f_values(f, a, b);
        case MonotoneProbe::squared_distance: {
            double da = a.norm2(), db = b.norm2();
            return db > da ? 1 : (db < da ? -1 : 0);
        }
        }
        return 0;
    };
    int dir = 0;
    for (std::size_t k = 1; k < branch.samples.size(); ++k) {
        int step = step_sign(branch.samples[k - 1], branch.samples[k]);
        // f-probe ties are steps below the positional noise band, allowed;
        // ties of the exact positional probes are genuine violations
        if (step == 0 && probe == MonotoneProbe::function_f) continue;
        if (step == 0 || (dir != 0 && step != dir)) {
            rep.direction = MonotonicityReport::Direction::violation;
            rep.violation_index = k;
            return rep;
        }
        dir = step;
    }
    if (dir == 0) {
        rep.direction = MonotonicityReport::Direction::violation;
        rep.violation_index = 0;
        return rep;
    }
    rep.direction = dir > 0 ? MonotonicityReport::Direction::strictly_increasing
                            : MonotonicityReport::Direction::strictly_decreasing;
    return rep;
}

namespace polar_detail {

// Projects p onto the level set f = eps along grad(f).
inline bool project_onto_level(const Polynomial& f, const Polynomial& fx, const Polynomial& fy,
                               double eps, double tol_abs, Vec2& p) {
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        double v = trace_detail::residual_at(f, p.x, p.y, eps, tol_abs);
        if (std::fabs(v) <= tol_abs) return true;
        Vec2 grad{fx.evaluate(p.x, p.y), fy.evaluate(p.x, p.y)};
        double g2 = grad.norm2();
        if (!(g2 > 1e-300) || !std::isfinite(v)) return false;
        p = p - grad * (v / g2);
    }
    return false;
}

} // namespace polar_detail

// Vertical tangencies of a traced level curve: the points where the curve
// meets the polar curve. Sign changes of df/dy along the curve give the
// odd-multiplicity crossings; |df/dy| dips that bottom out at zero give the
// even-multiplicity ones (tangencies of odd order). Each candidate is
// polished by Newton on the 2x2 system (f - eps, df/dy) = (0, 0), with a
// bisection-along-the-curve fallback. Result sorted by x, ties by y.
inline std::vector<TangencyPoint> vertical_tangencies(const LevelCurve& curve, const Polynomial& f) {
    const Polynomial fx = f.derivative(Var::x);
    const Polynomial fy = f.derivative(Var::y);
    const Polynomial g = fy;
    const Polynomial gx = g.derivative(Var::x);
    const Polynomial gy = g.derivative(Var::y);
    const double eps = curve.epsilon;
    const double tol_abs = 1e-10 * eps;
    const double r = curve.nbhd.radius > 0 ? curve.nbhd.radius : 1.0;
    const std::size_t n = curve.points.size();
    if (n < 3) return {};

    std::vector<double> gval(n);
    double gmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        gval[i] = polar_detail::robust_value(g, curve.points[i].x, curve.points[i].y, 0.0);
        gmax = std::max(gmax, std::fabs(gval[i]));
    }
    if (gmax == 0.0) return {};

    auto project = [&](Vec2& p) {
        return polar_detail::project_onto_level(f, fx, fy, eps, tol_abs, p);
    };

    // g along the curve, as a function of the chord parameter in [i, i+1]
    auto g_on_curve = [&](std::size_t i, double t, Vec2& where) {
        Vec2 p = curve.points[i] + (curve.points[(i + 1) % n] - curve.points[i]) * t;
        project(p);
        where = p;
        return polar_detail::robust_value(g, p.x, p.y, 0.0);
    };

    struct Candidate { Vec2 pos; };
    std::vector<Vec2> raw;

    auto newton2x2 = [&](Vec2 p, Vec2& out) {
        for (int it = 0; it < kNewtonMaxIter; ++it) {
            double a = fx.evaluate(p.x, p.y), b = fy.evaluate(p.x, p.y);
            double c = gx.evaluate(p.x, p.y), d = gy.evaluate(p.x, p.y);
            double gscale = std::max(std::hypot(c, d) * r, 1e-300);
            double v1 = trace_detail::residual_at(f, p.x, p.y, eps, tol_abs);
            double v2 = polar_detail::robust_value(g, p.x, p.y, kBranchTol * gscale);
            if (std::fabs(v1) <= tol_abs && std::fabs(v2) <= 1e-10 * gscale) {
                out = p;
                return true;
            }
            double det = a * d - b * c;
            if (!(std::fabs(det) > 1e-300) || !std::isfinite(v1) || !std::isfinite(v2)) return false;
            p.x -= (d * v1 - b * v2) / det;
            p.y -= (-c * v1 + a * v2) / det;
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
        }
        return false;
    };

    auto bisect_on_curve = [&](std::size_t i, double ta, double tb, int sa, Vec2& out) {
        Vec2 w;
        for (int it = 0; it < 100; ++it) {
            double tm = 0.5 * (ta + tb);
            double vm = g_on_curve(i, tm, w);
            int sm = vm > 0 ? 1 : (vm < 0 ? -1 : 0);
            if (sm == 0) { out = w; return true; }
            if (sm == sa) ta = tm;
            else tb = tm;
        }
        g_on_curve(i, 0.5 * (ta + tb), w);
        out = w;
        return true;
    };

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        int si = gval[i] > 0 ? 1 : (gval[i] < 0 ? -1 : 0);
        int sj = gval[j] > 0 ? 1 : (gval[j] < 0 ? -1 : 0);
        if (si == 0) {
            raw.push_back(curve.points[i]);
            continue;
        }
        if (sj != 0 && si != sj) {
            Vec2 mid = (curve.points[i] + curve.points[j]) * 0.5;
            Vec2 refined;
            if (newton2x2(mid, refined) &&
                dist_point_segment(refined, curve.points[i], curve.points[j]) < 8.0 * (curve.points[j] - curve.points[i]).norm() + 1e-9 * r) {
                raw.push_back(refined);
            } else if (bisect_on_curve(i, 0.0, 1.0, si, refined)) {
                Vec2 polished = refined;
                if (newton2x2(refined, polished)) refined = polished;
                raw.push_back(refined);
            } else {
                throw NewtonDiverged("tangency refinement failed");
            }
        }
    }

    // Even-multiplicity zeros of g along the curve: local dips of |g| that a
    // minimisation drives to (numerical) zero. These are the odd tangencies.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t prev = (i + n - 1) % n, next = (i + 1) % n;
        double m = std::fabs(gval[i]);
        if (m == 0.0 || m > 1e-4 * gmax) continue;
        if (m > std::fabs(gval[prev]) || m > std::fabs(gval[next])) continue;
        if ((gval[prev] > 0) != (gval[i] > 0) || (gval[next] > 0) != (gval[i] > 0)) continue;
        // golden-section on |g| along the curve across [prev, i] U [i, next]
        auto probe = [&](double u, Vec2& w) { // u in [0,2]: chord prev->i then i->next
            if (u <= 1.0) return std::fabs(g_on_curve(prev, u, w));
            return std::fabs(g_on_curve(i, u - 1.0, w));
        };
        double a = 0.0, b = 2.0;
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
        Vec2 w1, w2;
        double f1 = probe(c1, w1), f2 = probe(c2, w2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) { b = c2; c2 = c1; f2 = f1; w2 = w1; c1 = b - phi * (b - a); f1 = probe(c1, w1); }
            else { a = c1; c1 = c2; f1 = f2; w1 = w2; c2 = a + phi * (b - a); f2 = probe(c2, w2); }
        }
        Vec2 best = f1 < f2 ? w1 : w2;
        double vbest = std::min(f1, f2);
        if (vbest <= 1e-10 * gmax) raw.push_back(best);
    }

    // Merge near-duplicates (within the merge tolerance, flagged).
    double merge_tol = kMergeTolFactor * r;
    std::sort(raw.begin(), raw.end(), [](Vec2 a, Vec2 b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    std::vector<TangencyPoint> result;
    for (const Vec2& p : raw) {
        if (!result.empty() && (p - result.back().position).norm() <= merge_tol) {
            result.back().merged = true;
            continue;
        }
        TangencyPoint t;
        t.position = p;
        result.push_back(t);
    }

    // Parity: does x have a local extremum on the curve at the point? Step a
    // little along the (vertical) tangent, project back, compare x.
    const double step = 2.0 * r / std::max(curve.grid_used, 64);
    for (TangencyPoint& t : result) {
        Vec2 p = t.position;
        Vec2 a{p.x, p.y + step}, b{p.x, p.y - step};
        bool ok_a = project(a), ok_b = project(b);
        if (!ok_a || !ok_b) {
            t.parity = TangencyParity::even;
            continue;
        }
        double da = a.x - p.x, db = b.x - p.x;
        double tol = 1e-14 * r + 1e-12 * step;
        if ((da > tol && db > tol) || (da < -tol && db < -tol))
            t.parity = TangencyParity::even;
        else if ((da > tol && db < -tol) || (da < -tol && db > tol))
            t.parity = TangencyParity::odd;
        else
            t.parity = TangencyParity::even; // flat to tolerance: treat as extremum
    }

    std::sort(result.begin(), result.end(), [](const TangencyPoint& a, const TangencyPoint& b) {
        if (a.position.x != b.position.x) return a.position.x < b.position.x;
        return a.position.y < b.position.y;
    });
    return result;
}

// Fills TangencyPoint::branch_id by nearest traced half-branch within tol.
inline void assign_tangencies_to_branches(std::vector<TangencyPoint>& tangencies,
                                          const std::vector<HalfBranch>& branches, double tol) {
    for (TangencyPoint& t : tangencies) {
        double best = tol;
        for (const HalfBranch& hb : branches) {
            for (std::size_t i = 0; i + 1 < hb.samples.size(); ++i) {
                double d = dist_point_segment(t.position, hb.samples[i], hb.samples[i + 1]);
                if (d <= best) {
                    best = d;
                    t.branch_id = hb.id;
                }
            }
        }
    }
}

} // namespace curvetree
