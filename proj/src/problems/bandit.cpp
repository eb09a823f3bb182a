#include "advt/problems/bandit.hpp"

#include <cmath>

#include "advt/errors.hpp"

namespace advt {

ContinuousBandit::ContinuousBandit(BanditParams params)
    : params_(params), space_({params.lower}, {params.upper}) {
    require(params.optimum >= params.lower && params.optimum <= params.upper,
            "ContinuousBandit: optimum outside the action interval");
}

State ContinuousBandit::sample_initial_state(Rng&) const { return State{{0.0}, Outcome::running}; }

double ContinuousBandit::reward(double a) const { return 1.0 - std::abs(a - params_.optimum); }

StepResult ContinuousBandit::step(const State&, std::span<const double> action, Rng&) const {
    require(action.size() == 1, "ContinuousBandit: action must be 1-D");
    StepResult out;
    out.next = State{{0.0}, Outcome::success};
    out.reward = reward(action[0]);
    out.terminal = true;
    return out;
}

}  // namespace advt
