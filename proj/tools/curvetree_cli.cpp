// Command-line driver: analyze / stabilize / render / polar / kernel.
// Exit codes: 0 success, 1 usage or parse errors, 2 geometry/numeric errors.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "curvetree/curvetree.hpp"
#include "curvetree/json_io.hpp"
#include "curvetree/svg.hpp"

namespace fs = std::filesystem;
using namespace curvetree;

namespace {

struct CommonOpts {
    std::string poly_text;
    double eps = 0.1;
    int grid = 0;
    double nbhd_radius = 0;
    std::string config_path;
    std::string out_dir = ".";
    bool want_json = false;
    bool want_svg = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_eps = true) {
    cmd->add_option("--poly", o.poly_text, "polynomial in x, y")->required();
    if (with_eps) cmd->add_option("--eps", o.eps, "level value")->check(CLI::PositiveNumber);
    cmd->add_option("--grid", o.grid, "marching grid resolution")->check(CLI::PositiveNumber);
    cmd->add_option("--nbhd", o.nbhd_radius, "fixed neighbourhood radius")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--config", o.config_path, "key=value config file");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_flag("--json", o.want_json, "write JSON outputs (default on)");
    cmd->add_flag("--svg", o.want_svg, "write an SVG figure");
}

TraceConfig make_config(const CommonOpts& o) {
    TraceConfig cfg;
    if (!o.config_path.empty()) cfg = load_trace_config(o.config_path, cfg);
    if (o.grid > 0) cfg.grid_n = o.grid;
    if (o.nbhd_radius > 0) cfg.nbhd_candidates = {o.nbhd_radius};
    return cfg;
}

json config_to_json(const TraceConfig& cfg) {
    return json{{"grid_n", cfg.grid_n},
                {"max_refine", cfg.max_refine},
                {"refine_tol", cfg.refine_tol},
                {"nbhd_candidates", cfg.nbhd_candidates},
                {"positivity_grid", cfg.positivity_grid}};
}

void write_manifest(const std::string& command, const CommonOpts& o, const TraceConfig& cfg,
                    const std::vector<std::string>& outputs) {
    json m{{"command", command},
           {"poly_text", o.poly_text},
           {"config", config_to_json(cfg)},
           {"outputs", outputs},
           {"tool_version", kToolVersion}};
    atomic_write((fs::path(o.out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

struct AnalysisBundle {
    Neighbourhood nbhd;
    LevelCurve curve;
    std::vector<HalfBranch> branches;
    std::vector<TangencyPoint> tangencies;
    ReebTree tree;
    JordanReport jordan;
};

AnalysisBundle run_analysis(const Polynomial& f, double eps, const TraceConfig& cfg) {
    AnalysisBundle b;
    b.nbhd = good_neighbourhood(f, cfg);
    b.curve = trace_level(f, eps, b.nbhd, cfg);
    b.jordan = verify_jordan(b.curve);
    b.branches = polar_half_branches(f, b.nbhd, cfg);
    b.tangencies = vertical_tangencies(b.curve, f);
    assign_tangencies_to_branches(b.tangencies, b.branches, 1e-6 * b.nbhd.radius);
    b.tree = root_tree(build_reeb(b.curve, b.tangencies), b.curve);
    return b;
}

int cmd_analyze(const CommonOpts& o) {
    Polynomial f = parse_polynomial(o.poly_text);
    TraceConfig cfg = make_config(o);
    fs::create_directories(o.out_dir);

    AnalysisBundle b = run_analysis(f, o.eps, cfg);
    ConvexityReport conv = convexity_defect(b.curve, b.tree);
    StarReport star = star_kernel(b.curve);
    ValidationReport valid = validate_tree(b.tree);

    std::vector<std::string> outputs;
    std::string tree_path = (fs::path(o.out_dir) / "tree.json").string();
    atomic_write(tree_path, tree_to_json(b.tree).dump(2) + "\n");
    outputs.push_back(tree_path);

    json report{{"command", "analyze"},
                {"polynomial", f.to_string()},
                {"epsilon", o.eps},
                {"neighbourhood", neighbourhood_to_json(b.nbhd)},
                {"jordan", jordan_to_json(b.jordan)},
                {"tangencies", tangencies_to_json(b.tangencies)},
                {"canonical_code", canonical_code(b.tree)},
                {"validation", validation_to_json(valid)},
                {"convexity", convexity_to_json(conv)},
                {"star", star_to_json(star)},
                {"minimum_class",
                 classify_minimum(f) == MinimumClass::morse_convex ? "morse_convex" : "degenerate"}};
    std::string report_path = (fs::path(o.out_dir) / "report.json").string();
    atomic_write(report_path, report.dump(2) + "\n");
    outputs.push_back(report_path);

    if (o.want_svg) {
        std::string svg_path = (fs::path(o.out_dir) / "figure.svg").string();
        render_svg(b.curve, b.branches, b.tree, svg_path);
        outputs.push_back(svg_path);
    }
    write_manifest("analyze", o, cfg, outputs);
    std::cout << "analyze: " << (conv.is_convex ? "convex" : "non-convex") << ", code "
              << canonical_code(b.tree) << "\n";
    return 0;
}

int cmd_stabilize(const CommonOpts& o, double eps_start, double ratio, int steps) {
    Polynomial f = parse_polynomial(o.poly_text);
    TraceConfig cfg = make_config(o);
    fs::create_directories(o.out_dir);

    EpsilonLadder ladder = epsilon_ladder(eps_start, ratio, steps);
    StabilisationResult result = asymptotic_tree(f, ladder, cfg);

    std::string path = (fs::path(o.out_dir) / "stabilisation.json").string();
    atomic_write(path, stabilisation_to_json(result).dump(2) + "\n");
    write_manifest("stabilize", o, cfg, {path});

    if (result.stable_from)
        std::cout << "stabilize: stable from index " << *result.stable_from << ", code "
                  << result.levels.back().code << "\n";
    else
        std::cout << "stabilize: no stable suffix detected\n";
    return 0;
}

int cmd_render(const CommonOpts& o) {
    Polynomial f = parse_polynomial(o.poly_text);
    TraceConfig cfg = make_config(o);
    fs::create_directories(o.out_dir);
    AnalysisBundle b = run_analysis(f, o.eps, cfg);
    std::string svg_path = (fs::path(o.out_dir) / "figure.svg").string();
    render_svg(b.curve, b.branches, b.tree, svg_path);
    write_manifest("render", o, cfg, {svg_path});
    std::cout << "render: " << svg_path << "\n";
    return 0;
}

int cmd_polar(const CommonOpts& o) {
    Polynomial f = parse_polynomial(o.poly_text);
    TraceConfig cfg = make_config(o);
    fs::create_directories(o.out_dir);
    Polynomial g = polar_curve(f);
    Neighbourhood nbhd = good_neighbourhood(f, cfg);
    auto branches = polar_half_branches(f, nbhd, cfg);

    json jb = json::array();
    for (const HalfBranch& hb : branches) {
        json samples = json::array();
        for (const Vec2& p : hb.samples) samples.push_back({p.x, p.y});
        jb.push_back({{"id", hb.id},
                      {"side", hb.side == BranchSide::right ? "right" : "left"},
                      {"samples", samples}});
    }
    json out{{"command", "polar"},
             {"polynomial", f.to_string()},
             {"polar_curve", g.to_string()},
             {"divisible_by_x", g.divisible_by_x()},
             {"neighbourhood", neighbourhood_to_json(nbhd)},
             {"half_branches", jb}};
    std::string path = (fs::path(o.out_dir) / "polar.json").string();
    atomic_write(path, out.dump(2) + "\n");
    write_manifest("polar", o, cfg, {path});
    std::cout << "polar: " << branches.size() << " half-branches\n";
    return 0;
}

int cmd_kernel(const CommonOpts& o) {
    Polynomial f = parse_polynomial(o.poly_text);
    TraceConfig cfg = make_config(o);
    fs::create_directories(o.out_dir);
    Neighbourhood nbhd = good_neighbourhood(f, cfg);
    LevelCurve curve = trace_level(f, o.eps, nbhd, cfg);
    StarReport star = star_kernel(curve);
    json out{{"command", "kernel"},
             {"polynomial", f.to_string()},
             {"epsilon", o.eps},
             {"star", star_to_json(star)}};
    std::string path = (fs::path(o.out_dir) / "kernel.json").string();
    atomic_write(path, out.dump(2) + "\n");
    write_manifest("kernel", o, cfg, {path});
    std::cout << "kernel: " << (star.is_star ? "star-shaped" : "not star-shaped") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poincare-Reeb trees of polynomial level curves"};
    app.require_subcommand(1);

    CommonOpts analyze_o, stabilize_o, render_o, polar_o, kernel_o;
    double eps_start = 0.1, ratio = 0.5;
    int steps = 8;

    CLI::App* analyze = app.add_subcommand("analyze", "trace one level and measure its shape");
    add_common(analyze, analyze_o);
    CLI::App* stabilize =
        app.add_subcommand("stabilize", "run an epsilon-ladder and detect the asymptotic tree");
    add_common(stabilize, stabilize_o, false);
    stabilize->add_option("--eps-start", eps_start, "largest ladder level")
        ->check(CLI::PositiveNumber);
    stabilize->add_option("--ratio", ratio, "ladder ratio in (0,1)")
        ->check(CLI::Range(1e-9, 0.999999));
    stabilize->add_option("--steps", steps, "ladder length")->check(CLI::Range(2, 64));
    CLI::App* render = app.add_subcommand("render", "write an SVG of curve, polar set and tree");
    add_common(render, render_o);
    CLI::App* polar = app.add_subcommand("polar", "polar curve and traced half-branches");
    add_common(polar, polar_o, false);
    CLI::App* kernel = app.add_subcommand("kernel", "star-domain kernel of one level");
    add_common(kernel, kernel_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(analyze_o);
        if (app.got_subcommand(stabilize)) return cmd_stabilize(stabilize_o, eps_start, ratio, steps);
        if (app.got_subcommand(render)) return cmd_render(render_o);
        if (app.got_subcommand(polar)) return cmd_polar(polar_o);
        if (app.got_subcommand(kernel)) return cmd_kernel(kernel_o);
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
        switch (e.kind()) {
        case ErrorKind::usage:
        case ErrorKind::parse: return 1;
        default: return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
