#pragma once

#include "advt/pomdp.hpp"

namespace advt {

struct BanditParams {
    double lower = 0.0;
    double upper = 1.0;
    double optimum = 0.7;
    double discount = 0.95;

    template <typename V>
    void visit(V& v) {
        v("lower", lower);
        v("upper", upper);
        v("optimum", optimum);
        v("discount", discount);
    }
};

/// One-step problem with reward 1 - |a - optimum| on a 1-D interval.
class ContinuousBandit final : public PomdpModel {
public:
    explicit ContinuousBandit(BanditParams params = {});

    std::string name() const override { return "bandit"; }
    const BoundedMetricSpace& action_space() const override { return space_; }
    double discount() const override { return params_.discount; }
    State sample_initial_state(Rng& rng) const override;
    StepResult step(const State& state, std::span<const double> action, Rng& rng) const override;
    std::optional<double> heuristic_value(const State&) const override { return 0.0; }

    double reward(double a) const;
    const BanditParams& params() const { return params_; }

private:
    BanditParams params_;
    BoundedMetricSpace space_;
};

}  // namespace advt
