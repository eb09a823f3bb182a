#include "advt/pomdp.hpp"

#include "advt/errors.hpp"

namespace advt {

ObservationKey make_observation_key(const Observation& o, bool terminal, const ObservationMode& mode) {
    ObservationKey key;
    key.terminal = terminal;
    if (mode.continuous) {
        key.values = o.values;
    } else {
        key.symbol = o.symbol;
    }
    return key;
}

bool observation_matches(const ObservationKey& key, const Observation& o, bool terminal,
                         const ObservationMode& mode) {
    if (key.terminal != terminal) return false;
    if (!mode.continuous) return key.symbol == o.symbol;
    if (key.values.size() != o.values.size()) return false;
    return squared_distance(key.values, o.values) < mode.delta * mode.delta;
}

std::optional<std::size_t> match_observation_edge(std::span<const EdgeLabel> edges, int action_id,
                                                  std::span<const double> o, double delta) {
    require(delta > 0.0, "match_observation_edge: delta must be positive");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].action_id != action_id) continue;
        if (edges[i].key.values.size() != o.size()) continue;
        if (distance(edges[i].key.values, o) < delta) return i;
    }
    return std::nullopt;
}

ParticleSet::ParticleSet(std::size_t capacity) : capacity_(capacity) {
    require(capacity >= 1, "ParticleSet: capacity must be positive");
}

const State& ParticleSet::sample(Rng& rng) const {
    require(!states_.empty(), "ParticleSet::sample: empty particle set");
    return states_[uniform_index(rng, states_.size())];
}

void ParticleSet::add(State state, Rng& rng) {
    ++offered_;
    if (states_.size() < capacity_) {
        states_.push_back(std::move(state));
        return;
    }
    const std::size_t slot = uniform_index(rng, offered_);
    if (slot < capacity_) states_[slot] = std::move(state);
}

void ParticleSet::clear() {
    states_.clear();
    offered_ = 0;
}

ParticleSet filter_particles(const ParticleSet& particles, std::span<const double> action,
                             const Observation& observed, const PomdpModel& model,
                             std::size_t max_attempts, Rng& rng) {
    require(!particles.empty(), "filter_particles: empty belief");
    const ObservationMode mode = model.observation_mode();
    const ObservationKey key = make_observation_key(observed, false, mode);
    ParticleSet posterior(particles.capacity());
    for (std::size_t attempt = 0; attempt < max_attempts && posterior.size() < posterior.capacity();
         ++attempt) {
        const State& s = particles.sample(rng);
        StepResult result = model.step(s, action, rng);
        if (observation_matches(key, result.observation, result.terminal, mode)) {
            posterior.add(std::move(result.next), rng);
        }
    }
    if (posterior.empty()) {
        throw ParticleDepletion("filter_particles: no particle consistent with the observation after " +
                                std::to_string(max_attempts) + " attempts");
    }
    return posterior;
}

ParticleSet propagate_particles(const ParticleSet& particles, std::span<const double> action,
                                const PomdpModel& model, Rng& rng) {
    require(!particles.empty(), "propagate_particles: empty belief");
    ParticleSet next(particles.capacity());
    const std::size_t max_attempts = 10 * particles.capacity();
    for (std::size_t attempt = 0; attempt < max_attempts && next.size() < next.capacity(); ++attempt) {
        StepResult result = model.step(particles.sample(rng), action, rng);
        if (!result.terminal) next.add(std::move(result.next), rng);
    }
    if (next.empty()) return particles;
    return next;
}

}  // namespace advt
