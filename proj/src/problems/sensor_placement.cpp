#include "advt/problems/sensor_placement.hpp"

#include <algorithm>
#include <cmath>

#include "advt/errors.hpp"

namespace advt {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
    return out;
}

Mat3 rotation(bool about_z, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    if (about_z) return Mat3{{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
    return Mat3{{{c, 0.0, s}, {0.0, 1.0, 0.0}, {-s, 0.0, c}}};
}

BoundedMetricSpace velocity_box(const SensorPlacementParams& p) {
    require(p.dof >= 3, "SensorPlacement: need at least 3 joints");
    require(p.max_velocity > 0.0, "SensorPlacement: max_velocity must be positive");
    const auto d = static_cast<std::size_t>(p.dof);
    return BoundedMetricSpace(std::vector<double>(d, -p.max_velocity), std::vector<double>(d, p.max_velocity));
}

Box offset_box(const Vec3& c, Vec3 lo, Vec3 hi) {
    return Box{{c[0] + lo[0], c[1] + lo[1], c[2] + lo[2]}, {c[0] + hi[0], c[1] + hi[1], c[2] + hi[2]}};
}

}  // namespace

SensorPlacement::SensorPlacement(SensorPlacementParams params)
    : params_(params), space_(velocity_box(params_)) {
    require(params_.total_length > 0.0 && params_.link_radius >= 0.0, "SensorPlacement: bad link geometry");
    std::vector<double> goal_pose = start_angles();
    goal_pose[0] += params_.goal_yaw_offset;
    goal_ = forward_kinematics(goal_pose).back();

    const double g = params_.wall_gap, t = params_.wall_thickness;
    const double reach = params_.wall_reach, depth = params_.wall_depth;
    walls_ = {
        offset_box(goal_, {g, -depth, -g - t}, {g + t, g + t, g + t}),       // back
        offset_box(goal_, {-reach, g, -g - t}, {g + t, g + t, g + t}),       // front
        offset_box(goal_, {-reach, -depth, g}, {g, g, g + t}),               // top
        offset_box(goal_, {-reach, -depth, -g - t}, {g, g, -g}),             // bottom
    };
}

std::string SensorPlacement::name() const { return "sensorplacement-" + std::to_string(params_.dof); }

std::vector<double> SensorPlacement::start_angles() const {
    std::vector<double> theta(static_cast<std::size_t>(params_.dof), 0.0);
    theta[1] = params_.second_joint_start;
    theta[2] = params_.third_joint_start;
    return theta;
}

std::vector<Vec3> SensorPlacement::forward_kinematics(std::span<const double> angles) const {
    require(angles.size() == static_cast<std::size_t>(params_.dof), "forward_kinematics: wrong joint count");
    const double l = link_length();
    std::vector<Vec3> points;
    points.reserve(angles.size() + 1);
    Vec3 p{0.0, 0.0, 0.0};
    Mat3 frame{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    points.push_back(p);
    for (std::size_t i = 0; i < angles.size(); ++i) {
        frame = multiply(frame, rotation(i % 2 == 0, angles[i]));
        for (int k = 0; k < 3; ++k) p[k] += l * frame[k][0];
        points.push_back(p);
    }
    return points;
}

State SensorPlacement::sample_initial_state(Rng& rng) const {
    // Uniform over the start box with poses touching a wall rejected.
    const std::vector<double> start = start_angles();
    for (int attempt = 0; attempt < 10000; ++attempt) {
        State s;
        s.values = start;
        for (double& theta : s.values) {
            theta = uniform(rng, theta - params_.start_half_width, theta + params_.start_half_width);
        }
        const std::vector<Vec3> points = forward_kinematics(s.values);
        if (!body_collides(points) && tip_contact(points) == kNoContact) return s;
    }
    throw ContractViolation("SensorPlacement: no contact-free start pose found");
}

bool SensorPlacement::body_collides(const std::vector<Vec3>& points) const {
    for (std::size_t i = 0; i + 2 < points.size(); ++i) {
        for (const Box& wall : walls_) {
            if (segment_box_distance(points[i], points[i + 1], wall) < params_.link_radius) return true;
        }
    }
    return false;
}

std::int64_t SensorPlacement::tip_contact(const std::vector<Vec3>& points) const {
    const Vec3& a = points[points.size() - 2];
    const Vec3& b = points.back();
    for (std::size_t k = 0; k < walls_.size(); ++k) {
        if (segment_box_distance(a, b, walls_[k]) < params_.link_radius) return static_cast<std::int64_t>(k + 1);
    }
    return kNoContact;
}

StepResult SensorPlacement::step(const State& state, std::span<const double> action, Rng& rng) const {
    require(action.size() == state.values.size(), "SensorPlacement: action dimension mismatch");
    StepResult out;
    out.next.values.resize(state.values.size());
    for (std::size_t i = 0; i < action.size(); ++i) {
        double v = std::clamp(action[i], -params_.max_velocity, params_.max_velocity);
        if (params_.control_noise > 0.0) v += gaussian(rng, 0.0, params_.control_noise);
        out.next.values[i] = std::clamp(state.values[i] + v, -params_.joint_limit, params_.joint_limit);
    }

    const std::vector<Vec3> points = forward_kinematics(out.next.values);
    if (body_collides(points)) {
        out.next.outcome = Outcome::failure;
        out.reward = params_.collision_penalty;
        out.terminal = true;
        return out;
    }
    const std::int64_t contact = tip_contact(points);
    if (contact != kNoContact) {
        // The tip stops at the wall: the arm stays where it was.
        out.next.values = state.values;
        out.observation.symbol = contact;
        return out;
    }
    const Vec3& tip = points.back();
    const double dist = std::hypot(tip[0] - goal_[0], tip[1] - goal_[1], tip[2] - goal_[2]);
    if (dist <= params_.goal_radius) {
        out.next.outcome = Outcome::success;
        out.reward = params_.goal_reward;
        out.terminal = true;
    }
    return out;
}

std::optional<double> SensorPlacement::heuristic_value(const State& state) const {
    if (is_terminal(state)) return 0.0;
    const Vec3 tip = forward_kinematics(state.values).back();
    const double dist = std::hypot(tip[0] - goal_[0], tip[1] - goal_[1], tip[2] - goal_[2]);
    const double per_step = params_.max_velocity * params_.total_length;
    const double steps = std::max(1.0, std::ceil(std::max(0.0, dist - params_.goal_radius) / per_step));
    return params_.goal_reward * std::pow(params_.discount, steps);
}

}  // namespace advt
