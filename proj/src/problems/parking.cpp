#include "advt/problems/parking.hpp"

#include <algorithm>
#include <cmath>

#include "advt/errors.hpp"

namespace advt {

namespace {

BoundedMetricSpace control_box(const ParkingParams& p) {
    require(p.dimension == 2 || p.dimension == 3, "Parking: dimension must be 2 or 3");
    std::vector<double> lower{-p.max_steering, -p.max_acceleration};
    std::vector<double> upper{p.max_steering, p.max_acceleration};
    if (p.dimension == 3) {
        lower.push_back(-p.max_climb);
        upper.push_back(p.max_climb);
    }
    return BoundedMetricSpace(std::move(lower), std::move(upper));
}

}  // namespace

Parking::Parking(ParkingParams params, ParkingMap map)
    : params_(params), map_(std::move(map)), space_(control_box(params_)) {
    require(params_.wheelbase > 0.0 && params_.dt > 0.0, "Parking: wheelbase and dt must be positive");
    require(params_.collision_substeps >= 1, "Parking: collision_substeps must be >= 1");
    require(params_.observation_accuracy >= 0.0 && params_.observation_accuracy <= 1.0,
            "Parking: observation_accuracy must lie in [0,1]");
    require(map_.world_lower.size() == 2 && map_.world_upper.size() == 2, "Parking: world bounds must be 2-D");
    require(map_.goal_lower.size() == 2 && map_.goal_upper.size() == 2, "Parking: goal box must be 2-D");
    require(map_.terrain_y_bounds.size() >= 3, "Parking: need at least two terrain labels");
    require(!map_.start_lanes_y.empty(), "Parking: no start lanes");
    for (const auto& ob : map_.obstacles) {
        require(ob.size() == 2 && ob[0].size() == 2 && ob[1].size() == 2, "Parking: obstacles are 2-D boxes");
        obstacles_.push_back(Box{ob[0], ob[1]});
    }
}

std::string Parking::name() const { return params_.dimension == 2 ? "parking2d" : "parking3d"; }

State Parking::sample_initial_state(Rng& rng) const {
    const double lane = map_.start_lanes_y[uniform_index(rng, map_.start_lanes_y.size())];
    State s;
    s.values = {map_.start_x, lane + uniform(rng, -params_.start_jitter, params_.start_jitter),
                params_.start_heading, params_.start_speed};
    if (params_.dimension == 3) s.values.push_back(map_.start_altitude);
    return s;
}

std::vector<double> Parking::integrate(std::span<const double> v, std::span<const double> action) const {
    const double steering = std::clamp(action[0], -params_.max_steering, params_.max_steering);
    const double accel = std::clamp(action[1], -params_.max_acceleration, params_.max_acceleration);
    const double dt = params_.dt;
    std::vector<double> out(v.begin(), v.end());
    out[0] = v[0] + v[3] * std::cos(v[2]) * dt;
    out[1] = v[1] + v[3] * std::sin(v[2]) * dt;
    out[2] = v[2] + v[3] / params_.wheelbase * std::tan(steering) * dt;
    out[3] = std::clamp(v[3] + accel * dt, -params_.speed_limit, params_.speed_limit);
    if (params_.dimension == 3) {
        out[4] = v[4] + std::clamp(action[2], -params_.max_climb, params_.max_climb) * dt;
    }
    return out;
}

std::int64_t Parking::terrain_at(double x, double y) const {
    if (x < map_.terrain_x_lower || x > map_.terrain_x_upper) return kNoTerrain;
    const auto& b = map_.terrain_y_bounds;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        if (y >= b[k] && (y < b[k + 1] || (k + 2 == b.size() && y <= b[k + 1]))) {
            return static_cast<std::int64_t>(k);
        }
    }
    return kNoTerrain;
}

std::int64_t Parking::observe_terrain(std::int64_t truth, Rng& rng) const {
    if (truth == kNoTerrain) return kNoTerrain;
    if (uniform01(rng) < params_.observation_accuracy) return truth;
    const auto others = static_cast<std::size_t>(terrain_count() - 1);
    const auto pick = static_cast<std::int64_t>(uniform_index(rng, others));
    return pick < truth ? pick : pick + 1;
}

bool Parking::in_collision(std::span<const double> v) const {
    const double x = v[0], y = v[1];
    if (x < map_.world_lower[0] || x > map_.world_upper[0] || y < map_.world_lower[1] ||
        y > map_.world_upper[1]) {
        return true;
    }
    if (params_.dimension == 3 && (v[4] < map_.altitude_lower || v[4] > map_.altitude_upper)) return true;
    const double xy[2] = {x, y};
    return std::any_of(obstacles_.begin(), obstacles_.end(), [&](const Box& b) { return b.contains(xy); });
}

bool Parking::in_goal(std::span<const double> v) const {
    const double xy[2] = {v[0], v[1]};
    if (!Box{map_.goal_lower, map_.goal_upper}.contains(xy)) return false;
    if (params_.dimension == 3) return v[4] >= map_.goal_altitude_lower && v[4] <= map_.goal_altitude_upper;
    return true;
}

StepResult Parking::step(const State& state, std::span<const double> action, Rng& rng) const {
    require(action.size() == space_.dimension(), "Parking: action dimension mismatch");
    StepResult out;
    out.next.values = integrate(state.values, action);
    const auto& next = out.next.values;

    bool collided = false;
    std::vector<double> probe(next.size());
    for (int k = 1; k <= params_.collision_substeps && !collided; ++k) {
        const double t = static_cast<double>(k) / params_.collision_substeps;
        for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = state.values[i] + t * (next[i] - state.values[i]);
        collided = in_collision(probe);
    }

    if (collided) {
        out.next.outcome = Outcome::failure;
        out.reward = params_.collision_penalty;
    } else if (in_goal(next)) {
        out.next.outcome = Outcome::success;
        out.reward = params_.goal_reward;
    }
    out.terminal = out.next.outcome != Outcome::running;
    out.observation.symbol = observe_terrain(terrain_at(next[0], next[1]), rng);
    return out;
}

std::optional<double> Parking::heuristic_value(const State& state) const {
    if (is_terminal(state)) return 0.0;
    const auto& v = state.values;
    const double dx = std::max({map_.goal_lower[0] - v[0], 0.0, v[0] - map_.goal_upper[0]});
    const double dy = std::max({map_.goal_lower[1] - v[1], 0.0, v[1] - map_.goal_upper[1]});
    double d2 = dx * dx + dy * dy;
    if (params_.dimension == 3) {
        const double dz = std::max({map_.goal_altitude_lower - v[4], 0.0, v[4] - map_.goal_altitude_upper});
        d2 += dz * dz;
    }
    const double steps = std::max(1.0, std::ceil(std::sqrt(d2) / (params_.speed_limit * params_.dt)));
    return params_.goal_reward * std::pow(params_.discount, steps);
}

}  // namespace advt
