#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "advt/config.hpp"
#include "advt/pomdp.hpp"
#include "advt/solver.hpp"

namespace advt {

/// Per-problem solver tuning stored next to the problem constants.
struct SolverSettings {
    double exploration = 1.0;
    double lipschitz = 1.0;
    double refine_rate = 1.0;
    int max_depth = 50;
    int rollout_depth = 20;
    std::size_t particle_capacity = 2000;
    /// 0 selects the defaults derived from the action space.
    int boundary_samples = 0;
    double diameter_tolerance = 0.0;
    int walk_steps = 10;
    /// "max_q" or "max_visits".
    std::string best_action = "max_q";

    template <typename V>
    void visit(V& v) {
        v("exploration", exploration);
        v("lipschitz", lipschitz);
        v("refine_rate", refine_rate);
        v("max_depth", max_depth);
        v("rollout_depth", rollout_depth);
        v("particle_capacity", particle_capacity);
        v("boundary_samples", boundary_samples);
        v("diameter_tolerance", diameter_tolerance);
        v("walk_steps", walk_steps);
        v("best_action", best_action);
    }

    SolverConfig to_config(const BoundedMetricSpace& space) const;
};

struct ProblemInstance {
    std::string id;
    std::shared_ptr<const PomdpModel> model;
    SolverConfig solver;
    int step_cap = 50;
};

std::vector<std::string> problem_ids();
bool is_problem_id(const std::string& id);

/// Directory holding problems/ and maps/; ADVT_CONFIG_DIR in the environment overrides
/// the build-time location.
std::filesystem::path config_directory();

/// Built-in configuration: {"problem": {...}, "solver": {...}, "step_cap": n} plus
/// "map": {...} for problems with a static layout.
Json default_problem_config(const std::string& id);

/// Built-in map for `map_name` ("parking" or "vdp-tag").
Json default_map(const std::string& map_name);

/// Reads <dir>/problems/<id>.json when present, otherwise the built-in configuration.
/// A string "map" entry names a file under <dir>/maps.
Json load_problem_config(const std::string& id, const std::filesystem::path& dir = config_directory());

ProblemInstance make_problem(const std::string& id, const Json& config,
                             const std::filesystem::path& dir = config_directory());
ProblemInstance make_problem(const std::string& id);

}  // namespace advt
