#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "curvetree/errors.hpp"

namespace curvetree {

struct TraceConfig {
    int grid_n = 512;           // marching grid resolution (cells per axis)
    int max_refine = 3;         // adaptive grid doublings
    double refine_tol = 1e-10;  // Newton target: |f - eps| <= refine_tol * eps
    std::vector<double> nbhd_candidates = {1.0, 0.5, 0.25, 0.125};

    int positivity_grid = 256;  // per-axis sampling density for neighbourhood checks
    int threads = 0;            // 0 = CURVETREE_THREADS env or hardware

    int effective_threads() const {
        if (threads > 0) return threads;
        if (const char* env = std::getenv("CURVETREE_THREADS")) {
            int v = std::atoi(env);
            if (v > 0) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }
};

// key=value config file; '#' starts a comment. Recognised keys:
// grid_n, max_refine, refine_tol, nbhd_candidates (comma-separated radii).
inline TraceConfig load_trace_config(const std::string& path, TraceConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto notspace = line.find_first_not_of(" \t\r\n");
        if (notspace == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DegenerateInput("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r\n");
            auto e = s.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "grid_n") {
                base.grid_n = std::stoi(value);
            } else if (key == "max_refine") {
                base.max_refine = std::stoi(value);
            } else if (key == "refine_tol") {
                base.refine_tol = std::stod(value);
            } else if (key == "nbhd_candidates") {
                std::vector<double> radii;
                std::stringstream ss(value);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    item = trim(item);
                    if (!item.empty()) radii.push_back(std::stod(item));
                }
                if (radii.empty())
                    throw DegenerateInput("config line " + std::to_string(lineno) +
                                          ": empty nbhd_candidates");
                base.nbhd_candidates = radii;
            } else {
                throw DegenerateInput("config line " + std::to_string(lineno) +
                                      ": unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw DegenerateInput("config line " + std::to_string(lineno) + ": bad value for '" +
                                  key + "'");
        }
    }
    if (base.grid_n < 8) throw DegenerateInput("grid_n too small");
    if (base.max_refine < 0) throw DegenerateInput("max_refine must be >= 0");
    if (!(base.refine_tol > 0)) throw DegenerateInput("refine_tol must be positive");
    for (double r : base.nbhd_candidates)
        if (!(r > 0)) throw DegenerateInput("nbhd candidate radii must be positive");
    return base;
}

} // namespace curvetree
