#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "curvetree/errors.hpp"
#include "curvetree/polar.hpp"
#include "curvetree/reeb.hpp"
#include "curvetree/shape.hpp"
#include "curvetree/stabilize.hpp"
#include "curvetree/trace.hpp"

namespace curvetree {

using json = nlohmann::json;

inline const char* to_string(VertexKind k) {
    switch (k) {
    case VertexKind::leaf: return "leaf";
    case VertexKind::internal: return "internal";
    case VertexKind::odd_flagged: return "odd";
    case VertexKind::root: return "root";
    }
    return "internal";
}

inline VertexKind vertex_kind_from_string(const std::string& s) {
    if (s == "leaf") return VertexKind::leaf;
    if (s == "odd") return VertexKind::odd_flagged;
    if (s == "root") return VertexKind::root;
    return VertexKind::internal;
}

// {"vertices":[{"id","x","kind","preorder_class"}],"edges":[[a,b]],
//  "embedding":{"<id>":[edge indices]},"root":id|null}
inline json tree_to_json(const ReebTree& tree) {
    json out;
    out["vertices"] = json::array();
    for (const ReebVertex& v : tree.vertices) {
        out["vertices"].push_back({{"id", v.id},
                                   {"x", v.x},
                                   {"kind", to_string(v.kind)},
                                   {"preorder_class", v.preorder_class}});
    }
    out["edges"] = json::array();
    for (const auto& e : tree.edges) out["edges"].push_back({e[0], e[1]});
    out["embedding"] = json::object();
    for (std::size_t v = 0; v < tree.embedding.size(); ++v)
        out["embedding"][std::to_string(v)] = tree.embedding[v];
    out["root"] = tree.root_id.has_value() ? json(*tree.root_id) : json(nullptr);
    return out;
}

inline ReebTree tree_from_json(const json& in) {
    ReebTree tree;
    for (const auto& jv : in.at("vertices")) {
        ReebVertex v;
        v.id = jv.at("id").get<int>();
        v.x = jv.at("x").get<double>();
        v.kind = vertex_kind_from_string(jv.at("kind").get<std::string>());
        v.preorder_class = jv.at("preorder_class").get<int>();
        if (static_cast<std::size_t>(v.id) >= tree.vertices.size())
            tree.vertices.resize(static_cast<std::size_t>(v.id) + 1);
        tree.vertices[static_cast<std::size_t>(v.id)] = v;
    }
    for (const auto& je : in.at("edges"))
        tree.edges.push_back({je.at(0).get<int>(), je.at(1).get<int>()});
    tree.embedding.resize(tree.vertices.size());
    for (const auto& [key, val] : in.at("embedding").items()) {
        std::size_t v = static_cast<std::size_t>(std::stoul(key));
        if (v >= tree.embedding.size()) tree.embedding.resize(v + 1);
        tree.embedding[v] = val.get<std::vector<int>>();
    }
    if (!in.at("root").is_null()) tree.root_id = in.at("root").get<int>();
    return tree;
}

// Structural equality: the serialized surface (vertex classes and kinds,
// edges, rotations, root), ignoring coordinates-as-drawing-aids.
inline bool tree_structurally_equal(const ReebTree& a, const ReebTree& b) {
    if (a.vertices.size() != b.vertices.size() || a.edges.size() != b.edges.size()) return false;
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        if (a.vertices[i].id != b.vertices[i].id ||
            a.vertices[i].kind != b.vertices[i].kind ||
            a.vertices[i].preorder_class != b.vertices[i].preorder_class)
            return false;
    }
    if (a.edges != b.edges) return false;
    if (a.embedding != b.embedding) return false;
    return a.root_id == b.root_id;
}

inline json jordan_to_json(const JordanReport& r) {
    json out{{"closed", r.closed},
             {"simple", r.simple},
             {"winding", r.winding},
             {"counterclockwise", r.counterclockwise},
             {"max_residual", r.max_residual},
             {"pass", r.pass()}};
    if (r.crossing)
        out["crossing_segments"] = {r.crossing->first, r.crossing->second};
    return out;
}

inline json neighbourhood_to_json(const Neighbourhood& n) {
    return json{{"radius", n.radius},
                {"accepted", n.accepted},
                {"checks",
                 {{"only_minimum", n.checks.only_minimum},
                  {"isolated_zero", n.checks.isolated_zero},
                  {"polar_smooth", n.checks.polar_smooth},
                  {"f_monotone", n.checks.f_monotone},
                  {"x_monotone", n.checks.x_monotone},
                  {"single_boundary_crossing", n.checks.single_boundary_crossing},
                  {"grid_samples", n.checks.grid_samples},
                  {"circle_samples", n.checks.circle_samples}}}};
}

inline json tangencies_to_json(const std::vector<TangencyPoint>& ts) {
    json arr = json::array();
    for (const TangencyPoint& t : ts) {
        json jt{{"x", t.position.x},
                {"y", t.position.y},
                {"parity", t.parity == TangencyParity::even ? "even" : "odd"},
                {"merged", t.merged}};
        if (t.branch_id) jt["branch_id"] = *t.branch_id;
        arr.push_back(jt);
    }
    return arr;
}

inline json convexity_to_json(const ConvexityReport& r) {
    json out{{"is_convex", r.is_convex},
             {"defect", r.defect},
             {"hull_tol", r.hull_tol},
             {"reeb_vertex_count", r.reeb_vertex_count}};
    if (r.witness) {
        out["witness"] = {{"P", {r.witness->p.x, r.witness->p.y}},
                          {"N", {r.witness->n.x, r.witness->n.y}},
                          {"Q", {r.witness->q.x, r.witness->q.y}},
                          {"f_at_Q", r.witness->f_at_q},
                          {"exact_outside", r.witness->exact_outside}};
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

inline json star_to_json(const StarReport& r) {
    json kernel = json::array();
    for (const Vec2& p : r.kernel) kernel.push_back({p.x, p.y});
    json out{{"is_star", r.is_star},
             {"kernel", kernel},
             {"kernel_meets_axis", r.kernel_meets_axis},
             {"resolution_caveat", r.resolution_caveat}};
    out["axis_used"] = r.axis_used ? json(*r.axis_used) : json(nullptr);
    return out;
}

inline json validation_to_json(const ValidationReport& r) {
    return json{{"connected", r.connected},
                {"euler_ok", r.euler_ok},
                {"acyclic", r.acyclic},
                {"transversal", r.transversal},
                {"embedding_ok", r.embedding_ok},
                {"planar", r.planar},
                {"vertex_count", r.vertex_count},
                {"edge_count", r.edge_count},
                {"pass", r.pass()},
                {"detail", r.detail}};
}

inline json stabilisation_to_json(const StabilisationResult& r) {
    json levels = json::array();
    for (const LevelOutcome& lv : r.levels) {
        json jl{{"epsilon", lv.epsilon}, {"ok", lv.ok}};
        if (lv.ok) jl["code"] = lv.code;
        else jl["error"] = lv.error;
        levels.push_back(jl);
    }
    json out{{"ladder",
              {{"eps0", r.ladder.eps0},
               {"ratio", r.ladder.ratio},
               {"steps", r.ladder.steps},
               {"values", r.ladder.values}}},
             {"levels", levels},
             {"monotone_geodesics", r.monotone_geodesics}};
    out["stable_from"] = r.stable_from ? json(*r.stable_from) : json(nullptr);
    out["asymptotic_tree"] = r.asymptotic_tree ? tree_to_json(*r.asymptotic_tree) : json(nullptr);
    return out;
}

// Atomic file write: temp file in place, then rename.
inline void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("rename failed: " + tmp + " -> " + path);
}

} // namespace curvetree
