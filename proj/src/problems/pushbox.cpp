#include "advt/problems/pushbox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "advt/errors.hpp"

namespace advt {

namespace {

BoundedMetricSpace displacement_box(const PushboxParams& p) {
    require(p.dimension == 2 || p.dimension == 3, "Pushbox: dimension must be 2 or 3");
    require(p.max_displacement > 0.0, "Pushbox: max_displacement must be positive");
    const auto d = static_cast<std::size_t>(p.dimension);
    return BoundedMetricSpace(std::vector<double>(d, -p.max_displacement),
                              std::vector<double>(d, p.max_displacement));
}

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Earliest t in [0,1] at which a disk moving from `start` along `d` touches a disk at
/// `other` (combined radius `reach`) while closing in on it.
std::optional<double> first_contact(std::span<const double> start, std::span<const double> d,
                                    std::span<const double> other, double reach) {
    std::vector<double> w(start.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = start[i] - other[i];
    const double b = dot(w, d);
    if (b >= 0.0) return std::nullopt;
    const double c = dot(w, w) - reach * reach;
    if (c <= 0.0) return 0.0;
    const double a = dot(d, d);
    const double disc = b * b - a * c;
    if (disc < 0.0) return std::nullopt;
    const double t = (-b - std::sqrt(disc)) / a;
    if (t < 0.0 || t > 1.0) return std::nullopt;
    return t;
}

}  // namespace

PushboxParams PushboxParams::defaults(int dimension) {
    PushboxParams p;
    p.dimension = dimension;
    if (dimension == 3) {
        p.robot_start = {0.0, -2.5, 0.0};
        p.puck_start_center = {0.0, -0.5, 0.0};
        p.puck_start_half_width = {1.0, 0.5, 1.0};
        p.goal_center = {0.0, 2.5, 0.0};
    }
    return p;
}

Pushbox::Pushbox(PushboxParams params)
    : params_(std::move(params)),
      dim_(static_cast<std::size_t>(params_.dimension)),
      space_(displacement_box(params_)) {
    for (const auto* v : {&params_.robot_start, &params_.puck_start_center, &params_.puck_start_half_width,
                          &params_.goal_center}) {
        require(v->size() == dim_, "Pushbox: vector parameter has the wrong dimension");
    }
    require(params_.azimuth_sectors >= 1 && params_.elevation_sectors >= 1, "Pushbox: sector counts must be positive");
}

std::string Pushbox::name() const { return dim_ == 2 ? "pushbox2d" : "pushbox3d"; }

State Pushbox::make_state(std::span<const double> robot, std::span<const double> puck) const {
    State s;
    s.values.assign(robot.begin(), robot.end());
    s.values.insert(s.values.end(), puck.begin(), puck.end());
    return s;
}

State Pushbox::sample_initial_state(Rng& rng) const {
    std::vector<double> puck(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        puck[i] = uniform(rng, params_.puck_start_center[i] - params_.puck_start_half_width[i],
                          params_.puck_start_center[i] + params_.puck_start_half_width[i]);
    }
    return make_state(params_.robot_start, puck);
}

std::int64_t Pushbox::bearing_symbol(std::span<const double> robot, std::span<const double> puck,
                                     bool contact, Rng* rng) const {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    const double dx = puck[0] - robot[0];
    const double dy = puck[1] - robot[1];
    double azimuth = std::atan2(dy, dx);
    if (rng) azimuth += gaussian(*rng, 0.0, params_.bearing_noise);
    azimuth = std::fmod(azimuth, kTwoPi);
    if (azimuth < 0.0) azimuth += kTwoPi;
    const auto az_sectors = static_cast<std::int64_t>(params_.azimuth_sectors);
    const std::int64_t az = std::min<std::int64_t>(
        static_cast<std::int64_t>(azimuth / (kTwoPi / static_cast<double>(az_sectors))), az_sectors - 1);

    std::int64_t symbol = az;
    std::int64_t span = az_sectors;
    if (dim_ == 3) {
        double elevation = std::atan2(puck[2] - robot[2], std::hypot(dx, dy));
        if (rng) elevation += gaussian(*rng, 0.0, params_.bearing_noise);
        elevation = std::clamp(elevation, -std::numbers::pi / 2, std::numbers::pi / 2);
        const auto el_sectors = static_cast<std::int64_t>(params_.elevation_sectors);
        const std::int64_t el = std::min<std::int64_t>(
            static_cast<std::int64_t>((elevation + std::numbers::pi / 2) /
                                      (std::numbers::pi / static_cast<double>(el_sectors))),
            el_sectors - 1);
        symbol += span * el;
        span *= el_sectors;
    }
    return symbol + (contact ? span : 0);
}

StepResult Pushbox::step(const State& state, std::span<const double> action, Rng& rng) const {
    require(action.size() == dim_, "Pushbox: action dimension mismatch");
    const auto r = robot(state);
    const auto p = puck(state);

    std::vector<double> d(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        d[i] = std::clamp(action[i], -params_.max_displacement, params_.max_displacement);
        if (params_.robot_noise > 0.0) d[i] += gaussian(rng, 0.0, params_.robot_noise);
    }

    std::vector<double> robot_next(dim_), puck_next(p.begin(), p.end());
    for (std::size_t i = 0; i < dim_; ++i) robot_next[i] = r[i] + d[i];

    const double reach = params_.robot_radius + params_.puck_radius;
    const auto contact_t = first_contact(r, d, p, reach);
    if (contact_t) {
        std::vector<double> n(dim_);
        for (std::size_t i = 0; i < dim_; ++i) n[i] = p[i] - (r[i] + *contact_t * d[i]);
        double len = norm(n);
        for (double& x : n) x /= len;
        const double approach = std::max(0.0, dot(d, n));
        const double factor = std::max(0.0, 1.0 + gaussian(rng, 0.0, params_.push_noise));
        const double travel = params_.push_gain * approach * factor;
        if (params_.push_direction_noise > 0.0) {
            for (double& x : n) x += gaussian(rng, 0.0, params_.push_direction_noise);
            len = norm(n);
            for (double& x : n) x /= len;
        }
        for (std::size_t i = 0; i < dim_; ++i) puck_next[i] += travel * n[i];

        // The robot keeps moving; a puck still overlapping it is shoved clear.
        std::vector<double> gap(dim_);
        for (std::size_t i = 0; i < dim_; ++i) gap[i] = puck_next[i] - robot_next[i];
        const double g = norm(gap);
        if (g < reach) {
            for (std::size_t i = 0; i < dim_; ++i) {
                puck_next[i] = robot_next[i] + (g > 0.0 ? gap[i] / g : n[i]) * reach;
            }
        }
    }

    StepResult out;
    out.next = make_state(robot_next, puck_next);
    out.reward = params_.step_reward;

    const auto outside = [&](std::span<const double> x, double radius) {
        return std::any_of(x.begin(), x.end(),
                           [&](double c) { return std::abs(c) > params_.arena_half_width - radius; });
    };
    std::vector<double> to_goal(dim_);
    for (std::size_t i = 0; i < dim_; ++i) to_goal[i] = puck_next[i] - params_.goal_center[i];

    if (outside(robot_next, params_.robot_radius) || outside(puck_next, params_.puck_radius)) {
        out.next.outcome = Outcome::failure;
        out.reward = params_.collision_penalty;
    } else if (norm(to_goal) <= params_.goal_radius) {
        out.next.outcome = Outcome::success;
        out.reward = params_.goal_reward;
    }
    out.terminal = out.next.outcome != Outcome::running;
    out.observation.symbol = bearing_symbol(robot_next, puck_next, contact_t.has_value(), &rng);
    return out;
}

std::optional<double> Pushbox::heuristic_value(const State& state) const {
    if (is_terminal(state)) return 0.0;
    const auto r = robot(state);
    const auto p = puck(state);
    std::vector<double> to_goal(dim_);
    for (std::size_t i = 0; i < dim_; ++i) to_goal[i] = params_.goal_center[i] - p[i];
    const double puck_dist = norm(to_goal);
    const double reach = params_.robot_radius + params_.puck_radius;
    // Robot first moves to the spot behind the puck, then pushes it straight in.
    double approach2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double behind = p[i] - (puck_dist > 0.0 ? to_goal[i] / puck_dist : 0.0) * reach;
        approach2 += (behind - r[i]) * (behind - r[i]);
    }
    const double travel = std::sqrt(approach2) + std::max(0.0, puck_dist - params_.goal_radius);
    const double step_length = params_.max_displacement * std::sqrt(static_cast<double>(dim_));
    const double steps = std::ceil(travel / step_length);
    return params_.goal_reward * std::pow(params_.discount, steps);
}

}  // namespace advt
