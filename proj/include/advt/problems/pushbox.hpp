#pragma once

#include <vector>

#include "advt/pomdp.hpp"

namespace advt {

struct PushboxParams {
    int dimension = 2;
    double arena_half_width = 4.0;
    double robot_radius = 0.5;
    double puck_radius = 0.5;
    std::vector<double> robot_start{0.0, -2.5};
    std::vector<double> puck_start_center{0.0, -0.5};
    std::vector<double> puck_start_half_width{1.0, 0.5};
    std::vector<double> goal_center{0.0, 2.5};
    double goal_radius = 0.5;
    double max_displacement = 1.0;
    double robot_noise = 0.05;        ///< per-axis sd added to the displacement
    double push_gain = 1.0;           ///< puck travel per unit of approach speed
    double push_noise = 0.1;          ///< sd of the multiplicative push-speed factor
    double push_direction_noise = 0.1;
    double bearing_noise = 0.1;       ///< radians
    int azimuth_sectors = 12;
    int elevation_sectors = 6;        ///< 3-D only
    double goal_reward = 1000.0;
    double collision_penalty = -500.0;
    double step_reward = 0.0;
    double discount = 0.95;

    static PushboxParams defaults(int dimension);

    template <typename V>
    void visit(V& v) {
        v("dimension", dimension);
        v("arena_half_width", arena_half_width);
        v("robot_radius", robot_radius);
        v("puck_radius", puck_radius);
        v("robot_start", robot_start);
        v("puck_start_center", puck_start_center);
        v("puck_start_half_width", puck_start_half_width);
        v("goal_center", goal_center);
        v("goal_radius", goal_radius);
        v("max_displacement", max_displacement);
        v("robot_noise", robot_noise);
        v("push_gain", push_gain);
        v("push_noise", push_noise);
        v("push_direction_noise", push_direction_noise);
        v("bearing_noise", bearing_noise);
        v("azimuth_sectors", azimuth_sectors);
        v("elevation_sectors", elevation_sectors);
        v("goal_reward", goal_reward);
        v("collision_penalty", collision_penalty);
        v("step_reward", step_reward);
        v("discount", discount);
    }
};

/// A disk (sphere in 3-D) robot pushes a puck into a goal region. State values are
/// [robot position, puck position].
class Pushbox final : public PomdpModel {
public:
    explicit Pushbox(PushboxParams params);

    std::string name() const override;
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return params_.discount; }
    State sample_initial_state(Rng& rng) const override;
    StepResult step(const State& state, std::span<const double> action, Rng& rng) const override;
    std::optional<double> heuristic_value(const State& state) const override;

    const PushboxParams& params() const { return params_; }
    std::size_t dimension() const { return dim_; }

    std::span<const double> robot(const State& s) const { return {s.values.data(), dim_}; }
    std::span<const double> puck(const State& s) const { return {s.values.data() + dim_, dim_}; }
    State make_state(std::span<const double> robot, std::span<const double> puck) const;

    /// Observation symbol for the bearing from `robot` to `puck`; noise-free when `rng` is null.
    std::int64_t bearing_symbol(std::span<const double> robot, std::span<const double> puck,
                                bool contact, Rng* rng) const;

private:
    PushboxParams params_;
    std::size_t dim_;
    BoundedMetricSpace space_;
};

}  // namespace advt
