#pragma once

#include <array>
#include <vector>

#include "advt/pomdp.hpp"
#include "advt/problems/shapes.hpp"

namespace advt {

struct VdpTagParams {
    double mu = 2.0;
    double dt = 0.5;
    int rk4_substeps = 8;
    double target_noise = 0.05;
    double agent_speed = 1.0;
    double arena_half_width = 4.0;
    std::vector<double> agent_start{0.0, 0.0};
    double target_start_half_width = 4.0;
    double tag_radius = 0.1;
    int beam_count = 8;
    double beam_range = 1.0;
    double active_beam_noise = 0.1;
    double passive_beam_noise = 5.0;
    double tag_reward = 100.0;
    double sensor_cost = 5.0;
    double observation_delta = 25.0;
    double discount = 0.95;

    template <typename V>
    void visit(V& v) {
        v("mu", mu);
        v("dt", dt);
        v("rk4_substeps", rk4_substeps);
        v("target_noise", target_noise);
        v("agent_speed", agent_speed);
        v("arena_half_width", arena_half_width);
        v("agent_start", agent_start);
        v("target_start_half_width", target_start_half_width);
        v("tag_radius", tag_radius);
        v("beam_count", beam_count);
        v("beam_range", beam_range);
        v("active_beam_noise", active_beam_noise);
        v("passive_beam_noise", passive_beam_noise);
        v("tag_reward", tag_reward);
        v("sensor_cost", sensor_cost);
        v("observation_delta", observation_delta);
        v("discount", discount);
    }
};

struct VdpTagMap {
    /// Each obstacle is {{x_lo, y_lo}, {x_hi, y_hi}}.
    std::vector<std::vector<std::vector<double>>> obstacles{
        {{0.2, -0.05}, {2.0, 0.05}},
        {{-2.0, -0.05}, {-0.2, 0.05}},
        {{-0.05, 0.2}, {0.05, 2.0}},
        {{-0.05, -2.0}, {0.05, -0.2}},
    };

    template <typename V>
    void visit(V& v) {
        v("obstacles", obstacles);
    }
};

using Vec2 = std::array<double, 2>;

/// Van der Pol vector field (mu (x - x^3/3 - y), x / mu).
Vec2 van_der_pol(const Vec2& p, double mu);
Vec2 rk4_step(const Vec2& p, double mu, double h);

/// Tag a target drifting along a Van der Pol field. State values are
/// [agent_x, agent_y, target_x, target_y]; actions are (heading, sensor switch) with the
/// sensor on when the second component is >= 0.5. Observations are beam ranges.
class VdpTag final : public PomdpModel {
public:
    VdpTag(VdpTagParams params, VdpTagMap map);

    std::string name() const override { return "vdp-tag"; }
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return params_.discount; }
    State sample_initial_state(Rng& rng) const override;
    StepResult step(const State& state, std::span<const double> action, Rng& rng) const override;
    ObservationMode observation_mode() const override { return {true, params_.observation_delta}; }
    std::optional<double> heuristic_value(const State& state) const override;

    /// Agent position after moving from `from` along `heading`, stopped at obstacles.
    Vec2 move_agent(const Vec2& from, double heading) const;
    /// Noise-free target motion over one decision step.
    Vec2 advance_target(const Vec2& target) const;
    /// Beam readings before noise.
    std::vector<double> beam_ranges(const Vec2& agent, const Vec2& target) const;

    const VdpTagParams& params() const { return params_; }

private:
    VdpTagParams params_;
    std::vector<Box> obstacles_;
    BoundedMetricSpace space_;
};

}  // namespace advt
