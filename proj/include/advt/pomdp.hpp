#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advt/geometry.hpp"
#include "advt/random.hpp"

namespace advt {

enum class Outcome : std::uint8_t { running, success, failure };

struct State {
    std::vector<double> values;
    Outcome outcome = Outcome::running;

    bool operator==(const State&) const = default;
};

/// A discrete symbol, or a real vector for continuous-observation models.
struct Observation {
    std::int64_t symbol = 0;
    std::vector<double> values;

    bool operator==(const Observation&) const = default;
};

struct StepResult {
    State next;
    Observation observation;
    double reward = 0.0;
    bool terminal = false;
};

struct ObservationMode {
    bool continuous = false;
    /// Matching radius for continuous observations.
    double delta = 25.0;
};

/// Edge label below an action: the observation (its first-seen vector in continuous mode)
/// plus whether the transition ended the episode.
struct ObservationKey {
    std::int64_t symbol = 0;
    std::vector<double> values;
    bool terminal = false;

    bool operator==(const ObservationKey&) const = default;
};

/// Generative POMDP model G(s, a) -> (s', o, r). Implementations are immutable after
/// construction and `step` is reentrant, so one model can serve concurrent runs.
class PomdpModel {
public:
    virtual ~PomdpModel() = default;

    virtual std::string name() const = 0;
    virtual const BoundedMetricSpace& action_space() const = 0;
    virtual double discount() const = 0;
    virtual State sample_initial_state(Rng& rng) const = 0;
    virtual StepResult step(const State& state, std::span<const double> action, Rng& rng) const = 0;

    virtual bool is_terminal(const State& state) const { return state.outcome != Outcome::running; }
    virtual bool is_success(const State& state) const { return state.outcome == Outcome::success; }
    virtual ObservationMode observation_mode() const { return {}; }

    /// Domain value estimate for a fresh belief node. Empty means "use random rollouts".
    virtual std::optional<double> heuristic_value(const State&) const { return std::nullopt; }
};

ObservationKey make_observation_key(const Observation& o, bool terminal, const ObservationMode& mode);

/// True when `key` labels an edge that observation `o` falls into.
bool observation_matches(const ObservationKey& key, const Observation& o, bool terminal,
                         const ObservationMode& mode);

struct EdgeLabel {
    int action_id = -1;
    ObservationKey key;
};

/// Index of the first edge with action `action_id` whose stored observation vector is
/// strictly closer than `delta` to `o`.
std::optional<std::size_t> match_observation_edge(std::span<const EdgeLabel> edges, int action_id,
                                                  std::span<const double> o, double delta);

/// Unweighted particle belief. Once full, `add` keeps a uniform reservoir sample of
/// everything offered.
class ParticleSet {
public:
    explicit ParticleSet(std::size_t capacity = 2000);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return states_.size(); }
    bool empty() const { return states_.empty(); }
    const std::vector<State>& states() const { return states_; }

    const State& sample(Rng& rng) const;
    void add(State state, Rng& rng);
    void clear();

private:
    std::vector<State> states_;
    std::size_t capacity_;
    std::size_t offered_ = 0;
};

/// Rejection update tau(b, a, o): resample, simulate `action`, keep successors whose
/// observation matches. Throws ParticleDepletion if nothing survives `max_attempts` draws.
ParticleSet filter_particles(const ParticleSet& particles, std::span<const double> action,
                             const Observation& observed, const PomdpModel& model,
                             std::size_t max_attempts, Rng& rng);

/// Fallback when the filter depletes: propagate particles one step ignoring the observation.
ParticleSet propagate_particles(const ParticleSet& particles, std::span<const double> action,
                                const PomdpModel& model, Rng& rng);

}  // namespace advt
