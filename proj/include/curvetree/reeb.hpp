#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "curvetree/errors.hpp"
#include "curvetree/geometry.hpp"
#include "curvetree/polar.hpp"
#include "curvetree/trace.hpp"

namespace curvetree {

// Preorder tie tolerance, times the neighbourhood radius: vertices whose
// x-values differ by less than this share a preorder class (vertical
// bitangents are genuine ties).
inline constexpr double kTieTolFactor = 1e-6;

enum class VertexKind { leaf, internal, odd_flagged, root };

struct ReebVertex {
    int id = 0;
    double x = 0;
    double y_repr = 0; // representative fibre height; rendering aid only
    VertexKind kind = VertexKind::internal;
    int preorder_class = -1;
};

// Plane tree obtained by contracting the vertical fibre segments of the disk
// bounded by a level curve. Edges are oriented left to right (first endpoint
// has the smaller x). The embedding stores, per vertex, the incident edge
// ids in rotation order: edges arriving from the left by descending fibre
// height, then edges leaving to the right by ascending fibre height.
struct ReebTree {
    std::vector<ReebVertex> vertices;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::vector<int>> embedding;
    std::optional<int> root_id;

    double tie_tol = 0;
    std::vector<double> critical_xs;          // deduplicated event abscissae
    std::vector<std::vector<Vec2>> edge_paths; // per-edge polyline (drawing / planarity aid)

    const ReebVertex& vertex(int id) const { return vertices[static_cast<std::size_t>(id)]; }
    int degree(int id) const {
        return static_cast<int>(embedding[static_cast<std::size_t>(id)].size());
    }
};

struct ValidationReport {
    bool connected = false;
    bool euler_ok = false;        // V - E == 1
    bool acyclic = false;
    bool transversal = false;     // every edge joins distinct preorder classes
    bool embedding_ok = false;    // rotations structurally consistent
    bool planar = false;          // stacking orders admit an x-monotone drawing
    int vertex_count = 0;
    int edge_count = 0;
    std::string detail;

    bool pass() const {
        return connected && euler_ok && acyclic && transversal && embedding_ok && planar;
    }
};

namespace reeb_detail {

// Intervals of {f <= eps} on the vertical line x = x0, restricted to the
// component bounded by the traced polygon. Computed directly from f, so the
// fibre structure is exact even where it is finer than the trace grid.
inline std::vector<std::pair<double, double>> fiber_intervals(const LevelCurve& curve, double x0,
                                                              double ylo, double yhi,
                                                              int samples) {
    const Polynomial& f = curve.f;
    const double eps = curve.epsilon;
    auto value = [&](double y) { return trace_detail::residual_at(f, x0, y, eps, 1e-12 * eps); };

    for (int attempt = 0; attempt < 4; ++attempt, samples *= 4) {
        const double span = yhi - ylo;
        std::vector<double> ys(static_cast<std::size_t>(samples) + 1);
        std::vector<int> sg(ys.size());
        for (int k = 0; k <= samples; ++k) {
            std::size_t ku = static_cast<std::size_t>(k);
            ys[ku] = ylo + span * k / samples;
            double v = value(ys[ku]);
            sg[ku] = v > 0 ? 1 : (v < 0 ? -1 : 0);
        }
        if (sg.front() <= 0 || sg.back() <= 0) {
            // widen: the scan window must start and end outside the level set
            ylo -= 0.1 * span;
            yhi += 0.1 * span;
            continue;
        }
        std::vector<double> roots;
        bool degenerate = false;
        for (int k = 0; k < samples; ++k) {
            std::size_t ku = static_cast<std::size_t>(k);
            if (sg[ku] == 0) { degenerate = true; break; }
            if (sg[ku + 1] != 0 && sg[ku] != sg[ku + 1]) {
                double a = ys[ku], b = ys[ku + 1];
                int sa = sg[ku];
                for (int it = 0; it < 80; ++it) {
                    double m = 0.5 * (a + b);
                    double vm = value(m);
                    int sm = vm > 0 ? 1 : (vm < 0 ? -1 : 0);
                    if (sm == 0) { a = b = m; break; }
                    if (sm == sa) a = m;
                    else b = m;
                }
                roots.push_back(0.5 * (a + b));
            }
        }
        if (degenerate) continue; // a sample landed on the curve; resample finer
        if (roots.size() % 2 != 0) continue;
        std::vector<std::pair<double, double>> intervals;
        for (std::size_t k = 0; k + 1 < roots.size(); k += 2)
            intervals.emplace_back(roots[k], roots[k + 1]);
        return intervals;
    }
    throw EventMismatch("could not resolve the fibre structure at x = " + std::to_string(x0));
}

inline std::vector<std::pair<double, double>> component_intervals(const LevelCurve& curve,
                                                                  double x0, double ylo,
                                                                  double yhi, int samples) {
    auto intervals = fiber_intervals(curve, x0, ylo, yhi, samples);
    const double cell = 2.0 * curve.nbhd.radius / std::max(curve.grid_used, 1);
    std::vector<std::pair<double, double>> kept;
    for (auto& iv : intervals) {
        Vec2 mid{x0, 0.5 * (iv.first + iv.second)};
        if (winding_number(curve.points, mid) != 0) {
            kept.push_back(iv);
            continue;
        }
        double d = 1e300;
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            d = std::min(d, dist_point_segment(mid, curve.points[i],
                                               curve.points[(i + 1) % curve.points.size()]));
            if (d <= 2.0 * cell) break;
        }
        if (d <= 2.0 * cell) kept.push_back(iv);
    }
    return kept;
}

struct ActiveBand {
    int edge_id;
    std::pair<double, double> span; // most recent fibre interval
};

} // namespace reeb_detail

// Builds the Poincare-Reeb tree by sweeping the critical abscissae (the
// deduplicated tangency x-values). Between consecutive critical values the
// vertical line meets the disk in a fixed number of bands, each contracting
// to one edge; appear/vanish/split/merge events at the critical values
// create the vertices.
inline ReebTree build_reeb(const LevelCurve& curve, const std::vector<TangencyPoint>& tangencies) {
    if (curve.points.size() < 3) throw DegenerateInput("curve has no interior");
    if (tangencies.empty()) throw EventMismatch("a closed curve needs vertical tangencies");

    const double r = curve.nbhd.radius > 0 ? curve.nbhd.radius : 1.0;
    const double tie_tol = kTieTolFactor * r;

    double ylo = curve.points[0].y, yhi = ylo;
    for (const Vec2& p : curve.points) {
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
    double margin = 0.05 * (yhi - ylo) + 1e-9 * r;
    ylo -= margin;
    yhi += margin;
    const int slice_samples = std::max(4 * curve.grid_used, 4096);

    // Cluster tangencies into critical abscissae.
    std::vector<TangencyPoint> sorted = tangencies;
    std::sort(sorted.begin(), sorted.end(), [](const TangencyPoint& a, const TangencyPoint& b) {
        if (a.position.x != b.position.x) return a.position.x < b.position.x;
        return a.position.y < b.position.y;
    });
    struct Cluster {
        double x;
        std::vector<const TangencyPoint*> members;
    };
    std::vector<Cluster> clusters;
    for (const TangencyPoint& t : sorted) {
        if (clusters.empty() || t.position.x - clusters.back().members.back()->position.x > tie_tol) {
            clusters.push_back({t.position.x, {&t}});
        } else {
            clusters.back().members.push_back(&t);
        }
        double sum = 0;
        for (auto* m : clusters.back().members) sum += m->position.x;
        clusters.back().x = sum / static_cast<double>(clusters.back().members.size());
    }
    if (clusters.size() < 2) throw EventMismatch("fewer than two critical abscissae");

    // Half-gap offset for the near-event slices; outermost clusters only
    // have one finite gap.
    auto event_delta = [&](std::size_t k) {
        double left = k > 0 ? clusters[k].x - clusters[k - 1].x : 1e300;
        double right = k + 1 < clusters.size() ? clusters[k + 1].x - clusters[k].x : 1e300;
        return 0.25 * std::min(left, right);
    };

    ReebTree tree;
    tree.tie_tol = tie_tol;
    for (const Cluster& c : clusters) tree.critical_xs.push_back(c.x);

    std::vector<reeb_detail::ActiveBand> active; // ordered bottom to top
    std::vector<std::array<int, 2>> edge_ends;   // start vertex, end vertex (-1 while open)
    std::vector<std::vector<Vec2>> edge_paths;
    std::vector<std::vector<int>> left_edges_at, right_edges_at; // per vertex

    auto new_vertex = [&](double x, double y, VertexKind kind) {
        ReebVertex v;
        v.id = static_cast<int>(tree.vertices.size());
        v.x = x;
        v.y_repr = y;
        v.kind = kind;
        tree.vertices.push_back(v);
        left_edges_at.emplace_back();
        right_edges_at.emplace_back();
        return v.id;
    };
    auto open_edge = [&](int start_vertex, Vec2 at) {
        int id = static_cast<int>(edge_ends.size());
        edge_ends.push_back({start_vertex, -1});
        edge_paths.push_back({at});
        right_edges_at[static_cast<std::size_t>(start_vertex)].push_back(id);
        return id;
    };
    auto close_edge = [&](int edge_id, int end_vertex, Vec2 at) {
        edge_ends[static_cast<std::size_t>(edge_id)][1] = end_vertex;
        edge_paths[static_cast<std::size_t>(edge_id)].push_back(at);
        left_edges_at[static_cast<std::size_t>(end_vertex)].push_back(edge_id);
    };

    for (std::size_t k = 0; k < clusters.size(); ++k) {
        const double c = clusters[k].x;
        const double d = event_delta(k);
        auto L = reeb_detail::component_intervals(curve, c - d, ylo, yhi, slice_samples);
        auto R = k + 1 < clusters.size()
                     ? reeb_detail::component_intervals(curve, c + d, ylo, yhi, slice_samples)
                     : std::vector<std::pair<double, double>>{};
        if (k == 0 && !L.empty())
            throw EventMismatch("fibre not empty left of the first critical value");
        if (L.size() != active.size())
            throw EventMismatch("band count changed inside a gap");

        // Overlap components between L and R (order-preserving, with a fuzz
        // of a quarter of the local gap between intervals).
        auto expanded = [](const std::vector<std::pair<double, double>>& v, std::size_t i) {
            double lo = v[i].first, hi = v[i].second;
            double below = i > 0 ? (v[i].first - v[i - 1].second) : 1e300;
            double above = i + 1 < v.size() ? (v[i + 1].first - v[i].second) : 1e300;
            double fuzz = 0.25 * std::min(below, above);
            if (!(fuzz < 1e200)) fuzz = 0.25 * (hi - lo) + 1e-12;
            return std::make_pair(lo - fuzz, hi + fuzz);
        };

        struct Component {
            std::vector<std::size_t> lefts, rights;
            std::vector<const TangencyPoint*> events;
            double span_lo = 1e300, span_hi = -1e300;
        };
        std::vector<Component> comps;
        {
            std::size_t i = 0, j = 0;
            while (i < L.size() || j < R.size()) {
                Component comp;
                bool grew = true;
                // seed with whichever interval comes first
                auto push_left = [&](std::size_t idx) {
                    comp.lefts.push_back(idx);
                    auto e = expanded(L, idx);
                    comp.span_lo = std::min(comp.span_lo, e.first);
                    comp.span_hi = std::max(comp.span_hi, e.second);
                };
                auto push_right = [&](std::size_t idx) {
                    comp.rights.push_back(idx);
                    auto e = expanded(R, idx);
                    comp.span_lo = std::min(comp.span_lo, e.first);
                    comp.span_hi = std::max(comp.span_hi, e.second);
                };
                if (i < L.size() && (j >= R.size() || L[i].first <= R[j].first)) push_left(i++);
                else push_right(j++);
                while (grew) {
                    grew = false;
                    if (i < L.size()) {
                        auto e = expanded(L, i);
                        if (e.first <= comp.span_hi && e.second >= comp.span_lo) {
                            push_left(i++);
                            grew = true;
                        }
                    }
                    if (j < R.size()) {
                        auto e = expanded(R, j);
                        if (e.first <= comp.span_hi && e.second >= comp.span_lo) {
                            push_right(j++);
                            grew = true;
                        }
                    }
                }
                comps.push_back(std::move(comp));
            }
        }

        // Assign the cluster's tangency points to components by fibre height.
        for (const TangencyPoint* t : clusters[k].members) {
            std::size_t best = comps.size();
            double best_d = 1e300;
            for (std::size_t ci = 0; ci < comps.size(); ++ci) {
                double lo = comps[ci].span_lo, hi = comps[ci].span_hi;
                double dist = t->position.y < lo ? lo - t->position.y
                                                 : (t->position.y > hi ? t->position.y - hi : 0.0);
                if (dist < best_d) {
                    best_d = dist;
                    best = ci;
                }
            }
            if (best == comps.size())
                throw EventMismatch("tangency point does not meet any fibre component");
            comps[best].events.push_back(t);
        }

        // Emit events; rebuild the active list in bottom-to-top order. A
        // component is one vertex of the tree at resolution tau_x: whatever
        // sub-structure hides below the tie tolerance (tips and necks of
        // tangent tubes can sit 1e-10 apart) is contracted into it.
        std::vector<reeb_detail::ActiveBand> next_active(R.size(), {-1, {0, 0}});
        for (Component& comp : comps) {
            std::size_t nl = comp.lefts.size(), nr = comp.rights.size(), nt = comp.events.size();
            auto band_of = [&](std::size_t li) { return active[li]; };
            if (nl == 1 && nr == 1 && nt == 0) {
                // band passes through untouched
                auto band = band_of(comp.lefts[0]);
                band.span = R[comp.rights[0]];
                edge_paths[static_cast<std::size_t>(band.edge_id)].push_back(
                    Vec2{c, 0.5 * (band.span.first + band.span.second)});
                next_active[comp.rights[0]] = band;
                continue;
            }
            if (nt == 0)
                throw EventMismatch("band structure changes without a tangency: " +
                                    std::to_string(nl) + " in, " + std::to_string(nr) + " out");

            // vertex position: the extreme tangency for a leaf, the mean of
            // the cluster otherwise
            double vx = 0, vy = 0;
            if (nl + nr == 1 && nt > 1) {
                const TangencyPoint* extreme = comp.events[0];
                for (const TangencyPoint* t : comp.events) {
                    bool further = nl == 1 ? t->position.x > extreme->position.x
                                           : t->position.x < extreme->position.x;
                    if (further) extreme = t;
                }
                vx = extreme->position.x;
                vy = extreme->position.y;
            } else {
                for (const TangencyPoint* t : comp.events) vx += t->position.x;
                vx /= static_cast<double>(nt);
                vy = comp.events[0]->position.y;
            }

            VertexKind kind;
            if (nl + nr == 1) kind = VertexKind::leaf;
            else if (nl == 1 && nr == 1) kind = VertexKind::odd_flagged;
            else kind = VertexKind::internal;

            double y_repr;
            if (nt == 1 && nl + nr == 1) {
                y_repr = comp.events[0]->position.y; // degenerate fibre: the point itself
            } else if (nl >= 1) {
                auto span = L[comp.lefts[0]];
                for (std::size_t q : comp.lefts) {
                    span.first = std::min(span.first, L[q].first);
                    span.second = std::max(span.second, L[q].second);
                }
                y_repr = 0.5 * (span.first + span.second);
            } else {
                auto span = R[comp.rights[0]];
                for (std::size_t q : comp.rights) {
                    span.first = std::min(span.first, R[q].first);
                    span.second = std::max(span.second, R[q].second);
                }
                y_repr = 0.5 * (span.first + span.second);
            }
            if (nl + nr == 1 && nt == 1) y_repr = vy;

            int v = new_vertex(vx, y_repr, kind);
            Vec2 at{vx, y_repr};
            // close incoming bands top-down so the left rotation is by
            // descending fibre height
            for (std::size_t q = comp.lefts.size(); q-- > 0;)
                close_edge(band_of(comp.lefts[q]).edge_id, v, at);
            // open outgoing bands bottom-up (ascending fibre height)
            for (std::size_t q = 0; q < comp.rights.size(); ++q) {
                int e = open_edge(v, at);
                next_active[comp.rights[q]] = {e, R[comp.rights[q]]};
            }
        }
        for (const auto& band : next_active)
            if (band.edge_id < 0) throw EventMismatch("band left unmatched after an event");
        active = std::move(next_active);
    }
    if (!active.empty()) throw EventMismatch("bands still open after the last critical value");

    // Fix the left-edge rotation at merge vertices (descending y) and
    // assemble the final embedding: left edges (desc y), then right (asc y).
    tree.edges = edge_ends;
    tree.edge_paths = std::move(edge_paths);
    tree.embedding.resize(tree.vertices.size());
    for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
        auto& rot = tree.embedding[v];
        rot = left_edges_at[v];
        rot.insert(rot.end(), right_edges_at[v].begin(), right_edges_at[v].end());
    }

    // Preorder classes over all vertices.
    std::vector<int> order(tree.vertices.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return tree.vertices[static_cast<std::size_t>(a)].x <
               tree.vertices[static_cast<std::size_t>(b)].x;
    });
    int cls = -1;
    double last_x = 0;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        auto& v = tree.vertices[static_cast<std::size_t>(order[oi])];
        if (cls < 0 || v.x - last_x > tie_tol) {
            ++cls;
            last_x = v.x;
        }
        v.preorder_class = cls;
    }
    return tree;
}

namespace reeb_detail {

inline void recompute_classes(ReebTree& tree) {
    std::vector<int> order(tree.vertices.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return tree.vertices[static_cast<std::size_t>(a)].x <
               tree.vertices[static_cast<std::size_t>(b)].x;
    });
    int cls = -1;
    double last_x = 0;
    for (int id : order) {
        auto& v = tree.vertices[static_cast<std::size_t>(id)];
        if (cls < 0 || v.x - last_x > tree.tie_tol) {
            ++cls;
            last_x = v.x;
        }
        v.preorder_class = cls;
    }
}

inline double edge_y_at(const ReebTree& tree, int edge_id, double x) {
    const auto& path = tree.edge_paths[static_cast<std::size_t>(edge_id)];
    if (path.empty()) {
        const auto& e = tree.edges[static_cast<std::size_t>(edge_id)];
        return 0.5 * (tree.vertex(e[0]).y_repr + tree.vertex(e[1]).y_repr);
    }
    if (x <= path.front().x) return path.front().y;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (x <= path[i + 1].x) {
            double t = (path[i + 1].x - path[i].x) > 0
                           ? (x - path[i].x) / (path[i + 1].x - path[i].x)
                           : 0.5;
            return path[i].y + t * (path[i + 1].y - path[i].y);
        }
    }
    return path.back().y;
}

} // namespace reeb_detail

// Locates the fibre through the origin and roots the tree there: on an edge,
// the edge is subdivided by a new root vertex at x = 0; within tie tolerance
// of a critical value, the root is placed at the event vertex whose fibre
// holds the origin.
inline ReebTree root_tree(const ReebTree& tree_in, const LevelCurve& curve) {
    if (winding_number(curve.points, Vec2{0, 0}) == 0)
        throw DegenerateInput("origin is not inside the curve");
    ReebTree tree = tree_in;

    // Origin on (or within tie tolerance of) a critical fibre: reuse the
    // vertex whose representative height is nearest the axis.
    for (double cx : tree.critical_xs) {
        if (std::fabs(cx) <= tree.tie_tol) {
            int best = -1;
            double best_d = 1e300;
            for (const ReebVertex& v : tree.vertices) {
                if (std::fabs(v.x - cx) > tree.tie_tol) continue;
                double d = std::fabs(v.y_repr);
                if (d < best_d) {
                    best_d = d;
                    best = v.id;
                }
            }
            if (best >= 0) {
                tree.root_id = best;
                reeb_detail::recompute_classes(tree);
                return tree;
            }
        }
    }

    double ylo = curve.points[0].y, yhi = ylo;
    for (const Vec2& p : curve.points) {
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
    double margin = 0.05 * (yhi - ylo) + 1e-9;
    auto intervals = reeb_detail::component_intervals(curve, 0.0, ylo - margin, yhi + margin,
                                                      std::max(4 * curve.grid_used, 4096));
    int rank = -1;
    std::pair<double, double> origin_iv{0, 0};
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (intervals[i].first <= 0.0 && 0.0 <= intervals[i].second) {
            rank = static_cast<int>(i);
            origin_iv = intervals[i];
            break;
        }
    }
    if (rank < 0) throw EventMismatch("no fibre interval contains the origin");

    // Edges spanning x = 0, ordered by their height there.
    std::vector<int> spanning;
    for (std::size_t e = 0; e < tree.edges.size(); ++e) {
        double xa = tree.vertex(tree.edges[e][0]).x;
        double xb = tree.vertex(tree.edges[e][1]).x;
        if (xa < 0.0 && 0.0 < xb) spanning.push_back(static_cast<int>(e));
    }
    if (static_cast<int>(spanning.size()) != static_cast<int>(intervals.size()))
        throw EventMismatch("edge bands and fibre intervals disagree at x = 0");
    std::sort(spanning.begin(), spanning.end(), [&](int a, int b) {
        return reeb_detail::edge_y_at(tree, a, 0.0) < reeb_detail::edge_y_at(tree, b, 0.0);
    });
    int edge_id = spanning[static_cast<std::size_t>(rank)];

    // Subdivide.
    int a = tree.edges[static_cast<std::size_t>(edge_id)][0];
    int b = tree.edges[static_cast<std::size_t>(edge_id)][1];
    ReebVertex root;
    root.id = static_cast<int>(tree.vertices.size());
    root.x = 0.0;
    root.y_repr = 0.5 * (origin_iv.first + origin_iv.second);
    root.kind = VertexKind::root;
    tree.vertices.push_back(root);

    int new_edge = static_cast<int>(tree.edges.size());
    tree.edges[static_cast<std::size_t>(edge_id)] = {a, root.id};
    tree.edges.push_back({root.id, b});

    // Split the stored path at x = 0.
    auto path = tree.edge_paths.empty() ? std::vector<Vec2>{}
                                        : tree.edge_paths[static_cast<std::size_t>(edge_id)];
    std::vector<Vec2> left_path, right_path;
    Vec2 root_pt{0.0, root.y_repr};
    for (const Vec2& p : path) (p.x < 0 ? left_path : right_path).push_back(p);
    left_path.push_back(root_pt);
    right_path.insert(right_path.begin(), root_pt);
    if (!tree.edge_paths.empty()) {
        tree.edge_paths[static_cast<std::size_t>(edge_id)] = left_path;
        tree.edge_paths.push_back(right_path);
    }

    // b's rotation now refers to the new edge.
    for (int& e : tree.embedding[static_cast<std::size_t>(b)])
        if (e == edge_id) e = new_edge;
    tree.embedding.push_back({edge_id, new_edge}); // left edge first, then right

    tree.root_id = root.id;
    reeb_detail::recompute_classes(tree);
    return tree;
}

inline ValidationReport validate_tree(const ReebTree& tree) {
    ValidationReport rep;
    rep.vertex_count = static_cast<int>(tree.vertices.size());
    rep.edge_count = static_cast<int>(tree.edges.size());
    if (tree.vertices.empty()) {
        rep.detail = "empty tree";
        return rep;
    }

    // Connectivity and cycles via BFS.
    std::vector<std::vector<int>> adj(tree.vertices.size());
    for (std::size_t e = 0; e < tree.edges.size(); ++e) {
        adj[static_cast<std::size_t>(tree.edges[e][0])].push_back(static_cast<int>(e));
        adj[static_cast<std::size_t>(tree.edges[e][1])].push_back(static_cast<int>(e));
    }
    std::vector<int> seen(tree.vertices.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t visited = 0;
    bool cycle = false;
    std::vector<int> via_edge(tree.vertices.size(), -1);
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++visited;
        for (int e : adj[static_cast<std::size_t>(v)]) {
            int w = tree.edges[static_cast<std::size_t>(e)][0] == v
                        ? tree.edges[static_cast<std::size_t>(e)][1]
                        : tree.edges[static_cast<std::size_t>(e)][0];
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                via_edge[static_cast<std::size_t>(w)] = e;
                stack.push_back(w);
            } else if (e != via_edge[static_cast<std::size_t>(v)]) {
                cycle = true;
            }
        }
    }
    rep.connected = visited == tree.vertices.size();
    rep.euler_ok = static_cast<int>(tree.vertices.size()) - static_cast<int>(tree.edges.size()) == 1;
    rep.acyclic = !cycle;

    rep.transversal = true;
    for (const auto& e : tree.edges) {
        if (tree.vertex(e[0]).preorder_class == tree.vertex(e[1]).preorder_class) {
            rep.transversal = false;
            rep.detail = "edge joins tied preorder classes";
        }
    }

    // Embedding: every edge appears exactly once at each endpoint, with the
    // rotation split into a left block (edges ending here) then a right
    // block (edges starting here).
    rep.embedding_ok = tree.embedding.size() == tree.vertices.size();
    if (rep.embedding_ok) {
        std::vector<int> count(tree.edges.size(), 0);
        for (std::size_t v = 0; v < tree.embedding.size() && rep.embedding_ok; ++v) {
            bool seen_right = false;
            for (int e : tree.embedding[v]) {
                if (e < 0 || e >= static_cast<int>(tree.edges.size())) {
                    rep.embedding_ok = false;
                    break;
                }
                ++count[static_cast<std::size_t>(e)];
                bool is_right = tree.edges[static_cast<std::size_t>(e)][0] == static_cast<int>(v);
                bool is_left = tree.edges[static_cast<std::size_t>(e)][1] == static_cast<int>(v);
                if (!is_right && !is_left) {
                    rep.embedding_ok = false;
                    break;
                }
                if (is_right) seen_right = true;
                else if (seen_right) {
                    rep.embedding_ok = false; // left edge after right block
                    rep.detail = "rotation interleaves left and right edges";
                    break;
                }
            }
        }
        for (int c : count)
            if (c != 2) rep.embedding_ok = false;
    }

    // Planarity of the x-monotone drawing: between any two abscissae shared
    // by two edges, their vertical order must not flip.
    rep.planar = true;
    if (!tree.edge_paths.empty()) {
        for (std::size_t e1 = 0; e1 < tree.edges.size() && rep.planar; ++e1) {
            for (std::size_t e2 = e1 + 1; e2 < tree.edges.size() && rep.planar; ++e2) {
                double lo = std::max(tree.vertex(tree.edges[e1][0]).x,
                                     tree.vertex(tree.edges[e2][0]).x);
                double hi = std::min(tree.vertex(tree.edges[e1][1]).x,
                                     tree.vertex(tree.edges[e2][1]).x);
                if (!(lo < hi)) continue;
                int sign = 0;
                for (double t : {0.05, 0.5, 0.95}) {
                    double x = lo + (hi - lo) * t;
                    double dy = reeb_detail::edge_y_at(tree, static_cast<int>(e1), x) -
                                reeb_detail::edge_y_at(tree, static_cast<int>(e2), x);
                    int s = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
                    if (s == 0) continue;
                    if (sign == 0) sign = s;
                    else if (s != sign) {
                        rep.planar = false;
                        rep.detail = "edges cross in the x-monotone drawing";
                    }
                }
            }
        }
    }
    return rep;
}

struct CodeOptions {
    bool drop_odd = false; // splice out odd_flagged valency-2 vertices before coding
};

// Canonical code of a rooted plane tree: the equivalence class of the
// transversal tree (rooted plane structure, side of each subtree, preorder
// class offsets from the root). Numeric coordinates are excluded, so two
// trees are equivalent iff their codes are equal. Grammar documented in
// docs/tree-code.md.
inline std::string canonical_code(const ReebTree& tree_in, CodeOptions opts = {}) {
    if (!tree_in.root_id.has_value()) throw Unrooted("canonical_code requires a rooted tree");
    ReebTree tree = tree_in;

    if (opts.drop_odd) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const ReebVertex& v : tree.vertices) {
                if (v.kind != VertexKind::odd_flagged) continue;
                if (v.id == *tree.root_id) continue;
                const auto& rot = tree.embedding[static_cast<std::size_t>(v.id)];
                if (rot.size() != 2) continue;
                int e_in = rot[0], e_out = rot[1];
                if (tree.edges[static_cast<std::size_t>(e_in)][1] != v.id) std::swap(e_in, e_out);
                if (tree.edges[static_cast<std::size_t>(e_in)][1] != v.id ||
                    tree.edges[static_cast<std::size_t>(e_out)][0] != v.id)
                    continue;
                int b = tree.edges[static_cast<std::size_t>(e_out)][1];
                // splice: e_in absorbs e_out and runs through to b
                tree.edges[static_cast<std::size_t>(e_in)][1] = b;
                for (int& e : tree.embedding[static_cast<std::size_t>(b)])
                    if (e == e_out) e = e_in;
                tree.embedding[static_cast<std::size_t>(v.id)].clear();
                // mark e_out dead by pointing it at the vertex itself
                tree.edges[static_cast<std::size_t>(e_out)] = {-1, -1};
                auto& va = tree.vertices[static_cast<std::size_t>(v.id)];
                va.kind = VertexKind::internal; // detached
                changed = true;
            }
        }
        // compact: rebuild vertex/edge lists
        ReebTree packed;
        packed.tie_tol = tree.tie_tol;
        packed.critical_xs = tree.critical_xs;
        std::vector<int> vmap(tree.vertices.size(), -1), emap(tree.edges.size(), -1);
        for (const ReebVertex& v : tree.vertices) {
            if (!tree.embedding[static_cast<std::size_t>(v.id)].empty() ||
                v.id == *tree.root_id) {
                vmap[static_cast<std::size_t>(v.id)] = static_cast<int>(packed.vertices.size());
                packed.vertices.push_back(v);
                packed.vertices.back().id = vmap[static_cast<std::size_t>(v.id)];
            }
        }
        for (std::size_t e = 0; e < tree.edges.size(); ++e) {
            if (tree.edges[e][0] < 0) continue;
            emap[e] = static_cast<int>(packed.edges.size());
            packed.edges.push_back({vmap[static_cast<std::size_t>(tree.edges[e][0])],
                                    vmap[static_cast<std::size_t>(tree.edges[e][1])]});
        }
        packed.embedding.resize(packed.vertices.size());
        for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
            if (vmap[v] < 0) continue;
            for (int e : tree.embedding[v])
                packed.embedding[static_cast<std::size_t>(vmap[v])].push_back(
                    emap[static_cast<std::size_t>(e)]);
        }
        packed.root_id = vmap[static_cast<std::size_t>(*tree.root_id)];
        tree = std::move(packed);
        reeb_detail::recompute_classes(tree);
    }

    // Dense class ranks (drop_odd may have removed whole classes).
    std::vector<int> ranks;
    for (const ReebVertex& v : tree.vertices) ranks.push_back(v.preorder_class);
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    auto rank_of = [&](int cls) {
        return static_cast<int>(std::lower_bound(ranks.begin(), ranks.end(), cls) - ranks.begin());
    };

    const int root = *tree.root_id;
    const int root_rank = rank_of(tree.vertex(root).preorder_class);

    // Recursive plane traversal: children in rotation order starting after
    // the parent edge.
    std::string out = "R";
    auto other_end = [&](int e, int v) {
        return tree.edges[static_cast<std::size_t>(e)][0] == v
                   ? tree.edges[static_cast<std::size_t>(e)][1]
                   : tree.edges[static_cast<std::size_t>(e)][0];
    };
    auto emit = [&](auto&& self, int v, int parent_edge, char side) -> std::string {
        std::string s;
        if (v != root) {
            int o = rank_of(tree.vertex(v).preorder_class);
            int rank = side == 'R' ? o - root_rank : root_rank - o;
            s += side;
            s += '[' + std::to_string(rank) + ']';
            if (tree.vertex(v).kind == VertexKind::odd_flagged) s += 'o';
        }
        const auto& rot = tree.embedding[static_cast<std::size_t>(v)];
        std::size_t start = 0;
        if (parent_edge >= 0) {
            for (std::size_t i = 0; i < rot.size(); ++i)
                if (rot[i] == parent_edge) start = i + 1;
        }
        for (std::size_t k = 0; k < rot.size(); ++k) {
            int e = rot[(start + k) % rot.size()];
            if (e == parent_edge) continue;
            int w = other_end(e, v);
            char child_side = side;
            if (v == root) {
                int wo = rank_of(tree.vertex(w).preorder_class);
                child_side = wo >= root_rank ? 'R' : 'L';
                if (wo == root_rank) child_side = tree.vertex(w).x >= tree.vertex(v).x ? 'R' : 'L';
            }
            s += '(' + self(self, w, e, child_side) + ')';
        }
        return s;
    };
    out += emit(emit, root, -1, 'R');
    return out;
}

} // namespace curvetree
