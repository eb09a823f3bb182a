#include "advt/problems/registry.hpp"

#include <algorithm>
#include <cstdlib>

#include "advt/problems/bandit.hpp"
#include "advt/problems/parking.hpp"
#include "advt/problems/pushbox.hpp"
#include "advt/problems/sensor_placement.hpp"
#include "advt/problems/vdp_tag.hpp"

#ifndef ADVT_CONFIG_DIR
#define ADVT_CONFIG_DIR "config"
#endif

namespace advt {

namespace {

enum class Family { bandit, pushbox, parking, vdp_tag, sensor_placement };

struct Entry {
    const char* id;
    Family family;
    int dimension;
};

constexpr Entry kEntries[] = {
    {"bandit", Family::bandit, 1},
    {"pushbox2d", Family::pushbox, 2},
    {"pushbox3d", Family::pushbox, 3},
    {"parking2d", Family::parking, 2},
    {"parking3d", Family::parking, 3},
    {"vdp-tag", Family::vdp_tag, 2},
    {"vdp-tag-lownoise", Family::vdp_tag, 2},
    {"sensorplacement-6", Family::sensor_placement, 6},
    {"sensorplacement-8", Family::sensor_placement, 8},
    {"sensorplacement-10", Family::sensor_placement, 10},
    {"sensorplacement-12", Family::sensor_placement, 12},
};

const Entry& find_entry(const std::string& id) {
    for (const Entry& e : kEntries) {
        if (id == e.id) return e;
    }
    throw ConfigError("unknown problem '" + id + "'");
}

BanditParams bandit_defaults() { return {}; }

PushboxParams pushbox_defaults(int dimension) { return PushboxParams::defaults(dimension); }

ParkingParams parking_defaults(int dimension) {
    ParkingParams p;
    p.dimension = dimension;
    return p;
}

VdpTagParams vdp_defaults(const std::string& id) {
    VdpTagParams p;
    if (id == "vdp-tag-lownoise") p.target_noise = 0.01;
    return p;
}

SensorPlacementParams sensor_defaults(int dof) {
    SensorPlacementParams p;
    p.dof = dof;
    return p;
}

SolverSettings solver_defaults(const Entry& e) {
    SolverSettings s;
    switch (e.family) {
        case Family::bandit:
            s.exploration = 0.1;
            s.lipschitz = 1.0;
            s.refine_rate = 1.0;
            s.max_depth = 1;
            break;
        case Family::pushbox:
            s.exploration = 100.0;
            s.lipschitz = 10.0;
            s.refine_rate = 1.0;
            break;
        case Family::parking:
            s.exploration = 30.0;
            s.lipschitz = 20.0;
            s.refine_rate = 1.0;
            break;
        case Family::vdp_tag:
            s.exploration = 30.0;
            s.lipschitz = 10.0;
            s.refine_rate = 1.0;
            break;
        case Family::sensor_placement:
            s.exploration = 300.0;
            s.lipschitz = 1000.0;
            s.refine_rate = 10.0;
            break;
    }
    return s;
}

const char* map_name_for(Family family) {
    switch (family) {
        case Family::parking: return "parking";
        case Family::vdp_tag: return "vdp-tag";
        default: return nullptr;
    }
}

Json resolve_map(const Json& config, const Entry& e, const std::filesystem::path& dir) {
    auto it = config.find("map");
    if (it == config.end()) return default_map(map_name_for(e.family));
    if (it->is_string()) return load_json_file(dir / "maps" / it->get<std::string>());
    if (it->is_object()) return *it;
    throw ConfigError(std::string(e.id) + ".map: expected a file name or an object");
}

}  // namespace

SolverConfig SolverSettings::to_config(const BoundedMetricSpace& space) const {
    SolverConfig c;
    c.exploration = exploration;
    c.lipschitz = lipschitz;
    c.refine_rate = refine_rate;
    c.max_depth = max_depth;
    c.rollout_depth = rollout_depth;
    c.particle_capacity = particle_capacity;
    if (best_action == "max_q") {
        c.best_action = BestActionRule::max_q;
    } else if (best_action == "max_visits") {
        c.best_action = BestActionRule::max_visits;
    } else {
        throw ConfigError("solver.best_action: expected \"max_q\" or \"max_visits\", got '" + best_action + "'");
    }
    DiameterParams g = DiameterParams::defaults_for(space);
    if (boundary_samples > 0) g.boundary_samples = boundary_samples;
    if (diameter_tolerance > 0.0) g.tolerance = diameter_tolerance;
    if (walk_steps > 0) g.walk_steps = walk_steps;
    c.geometry = g;
    return c;
}

std::vector<std::string> problem_ids() {
    std::vector<std::string> ids;
    for (const Entry& e : kEntries) ids.emplace_back(e.id);
    return ids;
}

bool is_problem_id(const std::string& id) {
    return std::any_of(std::begin(kEntries), std::end(kEntries), [&](const Entry& e) { return id == e.id; });
}

std::filesystem::path config_directory() {
    if (const char* env = std::getenv("ADVT_CONFIG_DIR"); env && *env) return env;
    return ADVT_CONFIG_DIR;
}

Json default_map(const std::string& map_name) {
    if (map_name == "parking") return write_params(ParkingMap{});
    if (map_name == "vdp-tag") return write_params(VdpTagMap{});
    throw ConfigError("unknown map '" + map_name + "'");
}

Json default_problem_config(const std::string& id) {
    const Entry& e = find_entry(id);
    Json out = Json::object();
    switch (e.family) {
        case Family::bandit: out["problem"] = write_params(bandit_defaults()); break;
        case Family::pushbox: out["problem"] = write_params(pushbox_defaults(e.dimension)); break;
        case Family::parking: out["problem"] = write_params(parking_defaults(e.dimension)); break;
        case Family::vdp_tag: out["problem"] = write_params(vdp_defaults(id)); break;
        case Family::sensor_placement: out["problem"] = write_params(sensor_defaults(e.dimension)); break;
    }
    if (const char* map = map_name_for(e.family)) out["map"] = default_map(map);
    out["solver"] = write_params(solver_defaults(e));
    out["step_cap"] = e.family == Family::bandit ? 1 : 50;
    return out;
}

Json load_problem_config(const std::string& id, const std::filesystem::path& dir) {
    find_entry(id);
    const auto path = dir / "problems" / (id + ".json");
    if (!std::filesystem::exists(path)) return default_problem_config(id);
    return load_json_file(path);
}

ProblemInstance make_problem(const std::string& id, const Json& config, const std::filesystem::path& dir) {
    const Entry& e = find_entry(id);
    if (!config.is_object()) throw ConfigError(id + ": expected a JSON object");
    for (auto it = config.begin(); it != config.end(); ++it) {
        const std::string& key = it.key();
        if (key != "problem" && key != "solver" && key != "step_cap" && key != "map") {
            throw ConfigError(id + "." + key + ": unknown key");
        }
        if (key == "map" && !map_name_for(e.family)) throw ConfigError(id + ".map: problem has no map");
    }
    const Json empty = Json::object();
    const Json& problem = config.contains("problem") ? config.at("problem") : empty;
    const std::string ctx = id + ".problem";

    ProblemInstance out;
    out.id = id;
    try {
        switch (e.family) {
            case Family::bandit:
                out.model = std::make_shared<ContinuousBandit>(read_params(problem, ctx, bandit_defaults()));
                break;
            case Family::pushbox:
                out.model = std::make_shared<Pushbox>(read_params(problem, ctx, pushbox_defaults(e.dimension)));
                break;
            case Family::parking:
                out.model = std::make_shared<Parking>(read_params(problem, ctx, parking_defaults(e.dimension)),
                                                      read_params<ParkingMap>(resolve_map(config, e, dir), id + ".map"));
                break;
            case Family::vdp_tag:
                out.model = std::make_shared<VdpTag>(read_params(problem, ctx, vdp_defaults(id)),
                                                     read_params<VdpTagMap>(resolve_map(config, e, dir), id + ".map"));
                break;
            case Family::sensor_placement:
                out.model = std::make_shared<SensorPlacement>(read_params(problem, ctx, sensor_defaults(e.dimension)));
                break;
        }
    } catch (const ContractViolation& ex) {
        throw ConfigError(ctx + ": " + ex.what());
    }

    const Json& solver = config.contains("solver") ? config.at("solver") : empty;
    out.solver = read_params(solver, id + ".solver", solver_defaults(e)).to_config(out.model->action_space());
    if (config.contains("step_cap")) {
        try {
            out.step_cap = config.at("step_cap").get<int>();
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError(id + ".step_cap: " + ex.what());
        }
    } else {
        out.step_cap = e.family == Family::bandit ? 1 : 50;
    }
    if (out.step_cap < 1) throw ConfigError(id + ".step_cap: must be >= 1");
    return out;
}

ProblemInstance make_problem(const std::string& id) {
    const auto dir = config_directory();
    return make_problem(id, load_problem_config(id, dir), dir);
}

}  // namespace advt
