#pragma once

#include <array>
#include <vector>

#include "advt/pomdp.hpp"
#include "advt/problems/shapes.hpp"

namespace advt {

struct SensorPlacementParams {
    int dof = 8;
    double total_length = 2.0;
    double link_radius = 0.02;
    double second_joint_start = -1.57;
    double third_joint_start = 1.57;
    double start_half_width = 0.1;
    double max_velocity = 0.1;
    double control_noise = 0.01;
    double joint_limit = 3.14159;
    /// The goal is where the tip sits when the first joint of the start pose is turned by this much.
    double goal_yaw_offset = -0.45;
    double goal_radius = 0.1;
    double wall_gap = 0.12;
    double wall_thickness = 0.05;
    double wall_reach = 0.3;
    double wall_depth = 0.35;
    double goal_reward = 1000.0;
    double collision_penalty = -500.0;
    double discount = 0.95;

    template <typename V>
    void visit(V& v) {
        v("dof", dof);
        v("total_length", total_length);
        v("link_radius", link_radius);
        v("second_joint_start", second_joint_start);
        v("third_joint_start", third_joint_start);
        v("start_half_width", start_half_width);
        v("max_velocity", max_velocity);
        v("control_noise", control_noise);
        v("joint_limit", joint_limit);
        v("goal_yaw_offset", goal_yaw_offset);
        v("goal_radius", goal_radius);
        v("wall_gap", wall_gap);
        v("wall_thickness", wall_thickness);
        v("wall_reach", wall_reach);
        v("wall_depth", wall_depth);
        v("goal_reward", goal_reward);
        v("collision_penalty", collision_penalty);
        v("discount", discount);
    }
};

using Vec3 = std::array<double, 3>;

/// Serial chain of `dof` equal links on a fixed base at the origin. Joint i turns about
/// the local z axis for even i and the local y axis for odd i; each link extends along
/// its local x axis. State values are the joint angles; actions are joint velocities.
/// Observation symbol 0 means no contact, k in 1..4 means the tip link touched wall k.
class SensorPlacement final : public PomdpModel {
public:
    static constexpr std::int64_t kNoContact = 0;

    explicit SensorPlacement(SensorPlacementParams params);

    std::string name() const override;
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return params_.discount; }
    State sample_initial_state(Rng& rng) const override;
    StepResult step(const State& state, std::span<const double> action, Rng& rng) const override;
    std::optional<double> heuristic_value(const State& state) const override;

    /// Base, joint origins and tip: dof + 1 points.
    std::vector<Vec3> forward_kinematics(std::span<const double> angles) const;

    std::vector<double> start_angles() const;
    const Vec3& goal() const { return goal_; }
    const std::vector<Box>& walls() const { return walls_; }
    double link_length() const { return params_.total_length / params_.dof; }

    /// True when any link other than the tip link touches a wall.
    bool body_collides(const std::vector<Vec3>& points) const;
    /// 1-based id of the first wall the tip link touches, or kNoContact.
    std::int64_t tip_contact(const std::vector<Vec3>& points) const;

    const SensorPlacementParams& params() const { return params_; }

private:
    SensorPlacementParams params_;
    BoundedMetricSpace space_;
    Vec3 goal_{};
    std::vector<Box> walls_;
};

}  // namespace advt
