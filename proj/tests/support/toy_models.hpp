#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "advt/pomdp.hpp"

namespace advt::testing {

/// Deterministic two-step chain on [0,1]. Step 0 pays a, step 1 pays 1 - a, then the
/// episode ends. One observation symbol, no rollouts.
class TwoStepChain final : public PomdpModel {
public:
    explicit TwoStepChain(double discount = 0.5) : discount_(discount) {}

    std::string name() const override { return "two-step-chain"; }
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return discount_; }
    State sample_initial_state(Rng&) const override { return State{{0.0}, Outcome::running}; }

    StepResult step(const State& s, std::span<const double> a, Rng&) const override {
        const double t = s.values[0];
        StepResult out;
        out.reward = t == 0.0 ? a[0] : 1.0 - a[0];
        out.next.values = {t + 1.0};
        out.terminal = t + 1.0 >= 2.0;
        out.next.outcome = out.terminal ? Outcome::success : Outcome::running;
        return out;
    }

    std::optional<double> heuristic_value(const State&) const override { return 0.0; }

private:
    double discount_;
    BoundedMetricSpace space_{{0.0}, {1.0}};
};

/// Hidden state 0 or 1 that never changes; the observation reports it correctly with
/// probability `accuracy`.
class TwoStateSensor final : public PomdpModel {
public:
    TwoStateSensor(double prior_one, double accuracy) : prior_one_(prior_one), accuracy_(accuracy) {}

    std::string name() const override { return "two-state-sensor"; }
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return 0.95; }

    State sample_initial_state(Rng& rng) const override {
        return State{{uniform01(rng) < prior_one_ ? 1.0 : 0.0}, Outcome::running};
    }

    StepResult step(const State& s, std::span<const double>, Rng& rng) const override {
        StepResult out;
        out.next = s;
        const auto truth = static_cast<std::int64_t>(s.values[0]);
        out.observation.symbol = uniform01(rng) < accuracy_ ? truth : 1 - truth;
        return out;
    }

    /// Exact P(state = 1 | o) after one update.
    double posterior_one(std::int64_t o) const {
        const double like1 = o == 1 ? accuracy_ : 1.0 - accuracy_;
        const double like0 = o == 0 ? accuracy_ : 1.0 - accuracy_;
        return prior_one_ * like1 / (prior_one_ * like1 + (1.0 - prior_one_) * like0);
    }

private:
    double prior_one_;
    double accuracy_;
    BoundedMetricSpace space_{{0.0}, {1.0}};
};

/// Stochastic model used to fuzz the solver: 2-D actions, three observation symbols,
/// mixed-sign rewards and random termination.
class FuzzModel final : public PomdpModel {
public:
    std::string name() const override { return "fuzz"; }
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return 0.9; }

    State sample_initial_state(Rng& rng) const override {
        return State{{uniform(rng, -1.0, 1.0)}, Outcome::running};
    }

    StepResult step(const State& s, std::span<const double> a, Rng& rng) const override {
        StepResult out;
        const double x = s.values[0] + (a[0] - 0.5) + gaussian(rng, 0.0, 0.2);
        out.next.values = {x};
        out.reward = a[1] - std::abs(x) + gaussian(rng, 0.0, 0.1);
        out.observation.symbol = x < -0.3 ? 0 : (x > 0.3 ? 2 : 1);
        if (uniform01(rng) < 0.1) {
            out.terminal = true;
            out.next.outcome = std::abs(x) < 0.5 ? Outcome::success : Outcome::failure;
            out.reward += out.next.outcome == Outcome::success ? 5.0 : -5.0;
        }
        return out;
    }

private:
    BoundedMetricSpace space_{{0.0, 0.0}, {1.0, 1.0}};
};

/// One step with no reward, used where only the tree mechanics matter.
class TerminalAtStart final : public PomdpModel {
public:
    std::string name() const override { return "terminal-at-start"; }
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return 0.95; }
    State sample_initial_state(Rng&) const override { return State{{0.0}, Outcome::failure}; }
    StepResult step(const State& s, std::span<const double>, Rng&) const override {
        return StepResult{s, {}, 0.0, true};
    }

private:
    BoundedMetricSpace space_{{0.0}, {1.0}};
};

}  // namespace advt::testing
