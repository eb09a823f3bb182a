#include "advt/problems/vdp_tag.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "advt/errors.hpp"

namespace advt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kStandOff = 1e-6;

Vec2 axpy(const Vec2& p, double h, const Vec2& k) { return {p[0] + h * k[0], p[1] + h * k[1]}; }

}  // namespace

Vec2 van_der_pol(const Vec2& p, double mu) {
    const double x = p[0], y = p[1];
    return {mu * (x - x * x * x / 3.0 - y), x / mu};
}

Vec2 rk4_step(const Vec2& p, double mu, double h) {
    const Vec2 k1 = van_der_pol(p, mu);
    const Vec2 k2 = van_der_pol(axpy(p, h / 2, k1), mu);
    const Vec2 k3 = van_der_pol(axpy(p, h / 2, k2), mu);
    const Vec2 k4 = van_der_pol(axpy(p, h, k3), mu);
    return {p[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            p[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
}

VdpTag::VdpTag(VdpTagParams params, VdpTagMap map)
    : params_(std::move(params)),
      space_({0.0, 0.0}, {kTwoPi, 1.0}) {
    require(params_.rk4_substeps >= 1, "VdpTag: rk4_substeps must be >= 1");
    require(params_.beam_count >= 1, "VdpTag: beam_count must be >= 1");
    require(params_.agent_start.size() == 2, "VdpTag: agent_start must be 2-D");
    for (const auto& ob : map.obstacles) {
        require(ob.size() == 2 && ob[0].size() == 2 && ob[1].size() == 2, "VdpTag: obstacles are 2-D boxes");
        obstacles_.push_back(Box{ob[0], ob[1]});
    }
}

State VdpTag::sample_initial_state(Rng& rng) const {
    const double w = params_.target_start_half_width;
    return State{{params_.agent_start[0], params_.agent_start[1], uniform(rng, -w, w), uniform(rng, -w, w)},
                 Outcome::running};
}

Vec2 VdpTag::move_agent(const Vec2& from, double heading) const {
    const double length = params_.agent_speed * params_.dt;
    const Vec2 to{from[0] + length * std::cos(heading), from[1] + length * std::sin(heading)};
    double t_stop = 1.0;
    for (const Box& box : obstacles_) {
        if (auto t = segment_box_entry(from, to, box)) t_stop = std::min(t_stop, *t);
    }
    if (t_stop < 1.0) t_stop = std::max(0.0, t_stop - kStandOff / length);
    const double w = params_.arena_half_width;
    return {std::clamp(from[0] + t_stop * (to[0] - from[0]), -w, w),
            std::clamp(from[1] + t_stop * (to[1] - from[1]), -w, w)};
}

Vec2 VdpTag::advance_target(const Vec2& target) const {
    Vec2 p = target;
    const double h = params_.dt / params_.rk4_substeps;
    for (int i = 0; i < params_.rk4_substeps; ++i) p = rk4_step(p, params_.mu, h);
    return p;
}

std::vector<double> VdpTag::beam_ranges(const Vec2& agent, const Vec2& target) const {
    std::vector<double> ranges(static_cast<std::size_t>(params_.beam_count), params_.beam_range);
    const double dx = target[0] - agent[0], dy = target[1] - agent[1];
    const double dist = std::hypot(dx, dy);
    if (dist <= params_.beam_range) {
        double angle = std::atan2(dy, dx);
        if (angle < 0.0) angle += kTwoPi;
        const auto beam = std::min<std::size_t>(
            static_cast<std::size_t>(angle / (kTwoPi / params_.beam_count)), ranges.size() - 1);
        ranges[beam] = dist;
    }
    return ranges;
}

StepResult VdpTag::step(const State& state, std::span<const double> action, Rng& rng) const {
    require(action.size() == 2, "VdpTag: action must be (heading, sensor)");
    const bool sensor = action[1] >= 0.5;
    const Vec2 agent{state.values[0], state.values[1]};
    const Vec2 agent_next = move_agent(agent, action[0]);
    Vec2 target_next = advance_target({state.values[2], state.values[3]});
    if (params_.target_noise > 0.0) {
        target_next[0] += gaussian(rng, 0.0, params_.target_noise);
        target_next[1] += gaussian(rng, 0.0, params_.target_noise);
    }

    StepResult out;
    out.next.values = {agent_next[0], agent_next[1], target_next[0], target_next[1]};
    out.reward = sensor ? -params_.sensor_cost : 0.0;
    if (segment_point_distance(agent, agent_next, target_next) <= params_.tag_radius) {
        out.next.outcome = Outcome::success;
        out.reward += params_.tag_reward;
        out.terminal = true;
    }
    out.observation.values = beam_ranges(agent_next, target_next);
    const double noise = sensor ? params_.active_beam_noise : params_.passive_beam_noise;
    for (double& r : out.observation.values) r += gaussian(rng, 0.0, noise);
    return out;
}

std::optional<double> VdpTag::heuristic_value(const State& state) const {
    if (is_terminal(state)) return 0.0;
    const double dist = std::hypot(state.values[2] - state.values[0], state.values[3] - state.values[1]);
    const double steps =
        std::max(1.0, std::ceil(std::max(0.0, dist - params_.tag_radius) / (params_.agent_speed * params_.dt)));
    return params_.tag_reward * std::pow(params_.discount, steps);
}

}  // namespace advt
