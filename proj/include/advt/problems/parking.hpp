#pragma once

#include <vector>

#include "advt/pomdp.hpp"
#include "advt/problems/shapes.hpp"

namespace advt {

/// Static layout: obstacles, terrain strips, start lanes and the goal box. Obstacles and
/// the goal are given in the xy-plane; the 3-D variant extrudes obstacles over the full
/// altitude range and adds an altitude band to the goal.
struct ParkingMap {
    std::vector<double> world_lower{0.0, 0.0};
    std::vector<double> world_upper{12.0, 10.0};
    std::vector<std::vector<std::vector<double>>> obstacles{
        {{8.0, 0.0}, {10.0, 4.4}},
        {{8.0, 5.6}, {10.0, 10.0}},
    };
    std::vector<double> goal_lower{8.3, 4.6};
    std::vector<double> goal_upper{9.7, 5.4};
    double terrain_x_lower = 3.0;
    double terrain_x_upper = 6.0;
    /// Terrain label k covers y in [terrain_y_bounds[k], terrain_y_bounds[k+1]).
    std::vector<double> terrain_y_bounds{0.0, 3.5, 6.5, 10.0};
    double start_x = 1.0;
    std::vector<double> start_lanes_y{2.0, 5.0, 8.0};
    double altitude_lower = 0.0;
    double altitude_upper = 4.0;
    double start_altitude = 1.0;
    double goal_altitude_lower = 1.5;
    double goal_altitude_upper = 2.5;

    template <typename V>
    void visit(V& v) {
        v("world_lower", world_lower);
        v("world_upper", world_upper);
        v("obstacles", obstacles);
        v("goal_lower", goal_lower);
        v("goal_upper", goal_upper);
        v("terrain_x_lower", terrain_x_lower);
        v("terrain_x_upper", terrain_x_upper);
        v("terrain_y_bounds", terrain_y_bounds);
        v("start_x", start_x);
        v("start_lanes_y", start_lanes_y);
        v("altitude_lower", altitude_lower);
        v("altitude_upper", altitude_upper);
        v("start_altitude", start_altitude);
        v("goal_altitude_lower", goal_altitude_lower);
        v("goal_altitude_upper", goal_altitude_upper);
    }
};

struct ParkingParams {
    int dimension = 2;
    double wheelbase = 0.5;
    double dt = 1.0;
    double max_steering = 0.3;
    double max_acceleration = 0.5;
    double max_climb = 0.5;
    double speed_limit = 1.0;
    double start_jitter = 0.175;
    double start_heading = 0.0;
    double start_speed = 0.0;
    double observation_accuracy = 0.7;
    int collision_substeps = 10;
    double goal_reward = 100.0;
    double collision_penalty = -100.0;
    double discount = 0.95;

    template <typename V>
    void visit(V& v) {
        v("dimension", dimension);
        v("wheelbase", wheelbase);
        v("dt", dt);
        v("max_steering", max_steering);
        v("max_acceleration", max_acceleration);
        v("max_climb", max_climb);
        v("speed_limit", speed_limit);
        v("start_jitter", start_jitter);
        v("start_heading", start_heading);
        v("start_speed", start_speed);
        v("observation_accuracy", observation_accuracy);
        v("collision_substeps", collision_substeps);
        v("goal_reward", goal_reward);
        v("collision_penalty", collision_penalty);
        v("discount", discount);
    }
};

/// Vehicle with kinematic bicycle dynamics and a noisy terrain sensor. State values are
/// [x, y, heading, speed] in 2-D and [x, y, heading, speed, z] in 3-D; actions are
/// (steering, acceleration[, climb rate]).
class Parking final : public PomdpModel {
public:
    static constexpr std::int64_t kNoTerrain = -1;

    Parking(ParkingParams params, ParkingMap map);

    std::string name() const override;
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return params_.discount; }
    State sample_initial_state(Rng& rng) const override;
    StepResult step(const State& state, std::span<const double> action, Rng& rng) const override;
    std::optional<double> heuristic_value(const State& state) const override;

    /// Noise-free dynamics; no collision or goal handling.
    std::vector<double> integrate(std::span<const double> values, std::span<const double> action) const;

    /// True terrain label at (x, y), or kNoTerrain outside the terrain strips.
    std::int64_t terrain_at(double x, double y) const;
    std::int64_t observe_terrain(std::int64_t truth, Rng& rng) const;

    bool in_collision(std::span<const double> values) const;
    bool in_goal(std::span<const double> values) const;

    const ParkingParams& params() const { return params_; }
    const ParkingMap& map() const { return map_; }
    int terrain_count() const { return static_cast<int>(map_.terrain_y_bounds.size()) - 1; }

private:
    ParkingParams params_;
    ParkingMap map_;
    std::vector<Box> obstacles_;
    BoundedMetricSpace space_;
};

}  // namespace advt
