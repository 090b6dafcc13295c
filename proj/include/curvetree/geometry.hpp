#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace curvetree {

struct Vec2 {
    double x = 0, y = 0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    bool operator==(const Vec2&) const = default;
};

inline double orient(Vec2 a, Vec2 b, Vec2 c) { return (b - a).cross(c - a); }

inline double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = ab.norm2();
    if (len2 == 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

// Closed-segment intersection test, touching counts.
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    double d1 = orient(c, d, a);
    double d2 = orient(c, d, b);
    double d3 = orient(a, b, c);
    double d4 = orient(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on = [](Vec2 p, Vec2 q, Vec2 r) { // r collinear with pq, is it on the segment?
        return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
               std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
    };
    if (d1 == 0 && on(c, d, a)) return true;
    if (d2 == 0 && on(c, d, b)) return true;
    if (d3 == 0 && on(a, b, c)) return true;
    if (d4 == 0 && on(a, b, d)) return true;
    return false;
}

// Twice the signed area; positive for counterclockwise polygons.
inline double polygon_signed_area2(const std::vector<Vec2>& poly) {
    double s = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        s += a.cross(b);
    }
    return s;
}

inline double polygon_area(const std::vector<Vec2>& poly) {
    return std::fabs(polygon_signed_area2(poly)) / 2.0;
}

// Winding number of a closed polyline around p (signed crossing count).
inline int winding_number(const std::vector<Vec2>& poly, Vec2 p) {
    int w = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        Vec2 a = poly[i];
        Vec2 b = poly[(i + 1) % poly.size()];
        if (a.y <= p.y) {
            if (b.y > p.y && orient(a, b, p) > 0) ++w;
        } else {
            if (b.y <= p.y && orient(a, b, p) < 0) --w;
        }
    }
    return w;
}

inline bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p) {
    return winding_number(poly, p) != 0;
}

// Indices of the convex hull in counterclockwise order (monotone chain).
// Collinear points on the hull boundary are dropped.
inline std::vector<std::size_t> convex_hull_indices(const std::vector<Vec2>& pts) {
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
        return pts[a].y < pts[b].y;
    });
    if (pts.size() < 3) return idx;
    std::vector<std::size_t> hull;
    auto build = [&](auto begin, auto end) {
        std::size_t base = hull.size();
        for (auto it = begin; it != end; ++it) {
            while (hull.size() >= base + 2 &&
                   orient(pts[hull[hull.size() - 2]], pts[hull.back()], pts[*it]) <= 0)
                hull.pop_back();
            hull.push_back(*it);
        }
    };
    build(idx.begin(), idx.end());
    hull.pop_back();
    build(idx.rbegin(), idx.rend());
    hull.pop_back();
    return hull;
}

// First self-intersection of a closed polyline, if any. Non-adjacent segment
// pairs only; uses a uniform spatial hash so dense traces stay near-linear.
inline std::optional<std::pair<std::size_t, std::size_t>>
polyline_self_intersection(const std::vector<Vec2>& pts) {
    std::size_t n = pts.size();
    if (n < 4) return std::nullopt;
    double max_len = 0;
    for (std::size_t i = 0; i < n; ++i) {
        max_len = std::max(max_len, (pts[(i + 1) % n] - pts[i]).norm());
    }
    double cell = std::max(max_len, 1e-300);
    auto key = [&](long long cx, long long cy) {
        return static_cast<std::uint64_t>(cx) * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(cy);
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
    grid.reserve(n * 2);
    auto cells_of = [&](std::size_t i, auto&& fn) {
        Vec2 a = pts[i], b = pts[(i + 1) % n];
        long long x0 = static_cast<long long>(std::floor(std::min(a.x, b.x) / cell));
        long long x1 = static_cast<long long>(std::floor(std::max(a.x, b.x) / cell));
        long long y0 = static_cast<long long>(std::floor(std::min(a.y, b.y) / cell));
        long long y1 = static_cast<long long>(std::floor(std::max(a.y, b.y) / cell));
        for (long long cx = x0; cx <= x1; ++cx)
            for (long long cy = y0; cy <= y1; ++cy) fn(cx, cy);
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> candidates;
        cells_of(i, [&](long long cx, long long cy) {
            auto it = grid.find(key(cx, cy));
            if (it != grid.end())
                candidates.insert(candidates.end(), it->second.begin(), it->second.end());
        });
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        for (std::size_t j : candidates) {
            // skip adjacent segments (sharing an endpoint on the closed loop)
            if (j + 1 == i || (j == 0 && i + 1 == n)) continue;
            if (segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
                return std::make_pair(j, i);
        }
        cells_of(i, [&](long long cx, long long cy) { grid[key(cx, cy)].push_back(i); });
    }
    return std::nullopt;
}

// Kernel of a simple counterclockwise polygon: the intersection of the left
// half-planes of all edges, clipped Sutherland-Hodgman style starting from
// the polygon's bounding box. Empty result means the polygon is not
// star-shaped (up to the trace resolution).
inline std::vector<Vec2> polygon_kernel(const std::vector<Vec2>& poly) {
    if (poly.size() < 3) return {};
    double xmin = poly[0].x, xmax = poly[0].x, ymin = poly[0].y, ymax = poly[0].y;
    for (const Vec2& p : poly) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    double mx = (xmax - xmin) * 0.05 + 1e-12, my = (ymax - ymin) * 0.05 + 1e-12;
    std::vector<Vec2> region = {{xmin - mx, ymin - my}, {xmax + mx, ymin - my},
                                {xmax + mx, ymax + my}, {xmin - mx, ymax + my}};
    for (std::size_t i = 0; i < poly.size() && !region.empty(); ++i) {
        Vec2 a = poly[i];
        Vec2 b = poly[(i + 1) % poly.size()];
        if ((b - a).norm2() == 0.0) continue;
        std::vector<Vec2> next;
        next.reserve(region.size() + 1);
        for (std::size_t k = 0; k < region.size(); ++k) {
            Vec2 p = region[k];
            Vec2 q = region[(k + 1) % region.size()];
            double dp = orient(a, b, p);
            double dq = orient(a, b, q);
            if (dp >= 0) next.push_back(p);
            if ((dp > 0 && dq < 0) || (dp < 0 && dq > 0)) {
                double t = dp / (dp - dq);
                next.push_back(p + (q - p) * t);
            }
        }
        region = std::move(next);
    }
    if (polygon_area(region) < 1e-24) return {};
    return region;
}

// Largest pairwise distance between points (computed on the convex hull).
inline double point_set_diameter(const std::vector<Vec2>& pts) {
    if (pts.size() < 2) return 0;
    auto hull = convex_hull_indices(pts);
    double best = 0;
    for (std::size_t a = 0; a < hull.size(); ++a)
        for (std::size_t b = a + 1; b < hull.size(); ++b)
            best = std::max(best, (pts[hull[a]] - pts[hull[b]]).norm());
    return best;
}

} // namespace curvetree
