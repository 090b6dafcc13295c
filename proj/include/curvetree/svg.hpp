#pragma once

#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include "curvetree/errors.hpp"
#include "curvetree/json_io.hpp"
#include "curvetree/polar.hpp"
#include "curvetree/reeb.hpp"
#include "curvetree/trace.hpp"

namespace curvetree {

namespace svg_detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.8g", v);
    return buf;
}

inline std::string path_from(const std::vector<Vec2>& pts, bool close) {
    std::string d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        d += (i == 0 ? "M " : "L ");
        d += fmt(pts[i].x) + " " + fmt(pts[i].y) + " ";
    }
    if (close) d += "Z";
    return d;
}

} // namespace svg_detail

// Single figure: level curve (solid), polar branches (dashed), embedded tree
// (arcs through the band midpoints, vertices as dots, root highlighted).
// The y axis points up, as in the mathematical convention; the viewBox is
// the neighbourhood square.
inline void render_svg(const LevelCurve& curve, const std::vector<HalfBranch>& branches,
                       const ReebTree& tree, const std::string& path) {
    if (curve.points.empty()) throw EmptyInput("cannot render an empty curve");
    if (tree.vertices.empty()) throw EmptyInput("cannot render an empty tree");

    const double r = curve.nbhd.radius > 0 ? curve.nbhd.radius : 1.0;
    const double stroke = r / 200.0;
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    {
        std::time_t now = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        s += "<!-- generated " + std::string(buf) + " -->\n";
    }
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" + svg_detail::fmt(-r) + " " +
         svg_detail::fmt(-r) + " " + svg_detail::fmt(2 * r) + " " + svg_detail::fmt(2 * r) +
         "\">\n";
    s += "<g transform=\"scale(1,-1)\">\n";

    // polar branches, dashed
    for (const HalfBranch& hb : branches) {
        s += "<path class=\"polar\" fill=\"none\" stroke=\"#888888\" stroke-width=\"" +
             svg_detail::fmt(stroke * 0.6) + "\" stroke-dasharray=\"" +
             svg_detail::fmt(stroke * 3) + " " + svg_detail::fmt(stroke * 2) + "\" d=\"" +
             svg_detail::path_from(hb.samples, false) + "\"/>\n";
    }

    // the level curve
    s += "<path class=\"curve\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"" +
         svg_detail::fmt(stroke) + "\" d=\"" + svg_detail::path_from(curve.points, true) +
         "\"/>\n";

    // tree edges as x-monotone arcs
    for (std::size_t e = 0; e < tree.edges.size(); ++e) {
        std::vector<Vec2> pts;
        if (e < tree.edge_paths.size() && tree.edge_paths[e].size() >= 2) {
            pts = tree.edge_paths[e];
        } else {
            const auto& ends = tree.edges[e];
            pts = {{tree.vertex(ends[0]).x, tree.vertex(ends[0]).y_repr},
                   {tree.vertex(ends[1]).x, tree.vertex(ends[1]).y_repr}};
        }
        s += "<path class=\"tree-edge\" fill=\"none\" stroke=\"#c43c1e\" stroke-width=\"" +
             svg_detail::fmt(stroke * 1.2) + "\" d=\"" + svg_detail::path_from(pts, false) +
             "\"/>\n";
    }

    // vertices; the root gets a ring
    for (const ReebVertex& v : tree.vertices) {
        bool is_root = tree.root_id && *tree.root_id == v.id;
        s += "<circle class=\"" + std::string(is_root ? "root" : "vertex") + "\" cx=\"" +
             svg_detail::fmt(v.x) + "\" cy=\"" + svg_detail::fmt(v.y_repr) + "\" r=\"" +
             svg_detail::fmt(stroke * (is_root ? 3.2 : 2.0)) + "\" fill=\"" +
             (is_root ? "#ffffff" : "#c43c1e") + "\"" +
             (is_root ? " stroke=\"#c43c1e\" stroke-width=\"" + svg_detail::fmt(stroke) + "\""
                      : "") +
             "/>\n";
    }

    s += "</g>\n</svg>\n";
    atomic_write(path, s);
}

} // namespace curvetree
